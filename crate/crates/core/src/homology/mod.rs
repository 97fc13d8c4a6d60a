//! Integral simplicial homology.
//!
//! Boundary matrices use the canonical simplex order of the complex for both
//! rows and columns; the entry for deleting the `i`-th smallest vertex of a
//! column simplex is `(-1)^i`. Betti numbers and torsion both come out of one
//! Smith normal form per boundary map.

mod matrix;
mod snf;

pub use matrix::{IntegerMatrix, Matrix};
pub use snf::{prime_power_factors, smith_normal_form, SmithDecomposition};

use serde::{Deserialize, Serialize};

use crate::complex::{ComplexError, SimplicialComplex};

/// Separator used when one homological degree carries several torsion
/// summands, e.g. `"Z_2 + Z_4"`.
pub const TORSION_SEPARATOR: &str = " + ";

/// Betti numbers and torsion coefficients in every dimension `0..=dim`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyProfile {
    pub betti: Vec<usize>,
    /// Prime-power torsion summands per degree, each rendered `Z_q`.
    pub torsion: Vec<Vec<String>>,
}

impl HomologyProfile {
    /// One string per degree in the dataset encoding: `""` for no torsion.
    pub fn torsion_strings(&self) -> Vec<String> {
        self.torsion.iter().map(|t| t.join(TORSION_SEPARATOR)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    pub fn has_torsion(&self) -> bool {
        self.torsion.iter().any(|t| !t.is_empty())
    }
}

/// Boundary map from `n`-chains to `(n-1)`-chains with machine-integer entries.
pub(crate) fn boundary_i64(k: &SimplicialComplex, n: usize) -> Matrix<i64> {
    let cols = k.faces_or_empty(n);
    if n == 0 {
        return Matrix::zeros(0, cols.len());
    }
    let rows = k.faces_or_empty(n - 1);
    let mut m = Matrix::zeros(rows.len(), cols.len());
    for (j, sigma) in cols.iter().enumerate() {
        for (i, face) in sigma.boundary_faces().enumerate() {
            let r = rows.binary_search(&face).expect("complex is downward closed");
            m[(r, j)] = if i % 2 == 0 { 1 } else { -1 };
        }
    }
    m
}

/// The boundary map `∂_n` as an integer matrix, rows indexed by the
/// `(n-1)`-simplices and columns by the `n`-simplices.
pub fn boundary_matrix(k: &SimplicialComplex, n: usize) -> Result<IntegerMatrix, ComplexError> {
    check_dim(k, n)?;
    Ok(IntegerMatrix::from(&boundary_i64(k, n)))
}

fn check_dim(k: &SimplicialComplex, n: usize) -> Result<(), ComplexError> {
    match k.dim() {
        Some(d) if n <= d => Ok(()),
        dim => Err(ComplexError::DimensionOutOfRange { requested: n, dim }),
    }
}

fn torsion_labels(snf: &SmithDecomposition) -> Vec<String> {
    let mut parts: Vec<_> = snf.torsion_factors().flat_map(prime_power_factors).collect();
    parts.sort();
    parts.into_iter().map(|q| format!("Z_{q}")).collect()
}

/// Betti number and torsion summands of `H_n(K; Z)`.
pub fn homology(k: &SimplicialComplex, n: usize) -> Result<(usize, Vec<String>), ComplexError> {
    check_dim(k, n)?;
    let rank_n = if n == 0 { 0 } else { snf::smith_normal_form_i64(&boundary_i64(k, n)).rank };
    let upper = snf::smith_normal_form_i64(&boundary_i64(k, n + 1));
    let f_n = k.faces_or_empty(n).len();
    Ok((f_n - rank_n - upper.rank, torsion_labels(&upper)))
}

pub fn homology_profile(k: &SimplicialComplex) -> HomologyProfile {
    let Some(dim) = k.dim() else {
        return HomologyProfile { betti: Vec::new(), torsion: Vec::new() };
    };
    // decomps[n] is the SNF of ∂_n for n in 1..=dim+1; ∂_0 and ∂_{dim+1} are zero maps.
    let decomps: Vec<SmithDecomposition> = (0..=dim + 1)
        .map(|n| {
            if n == 0 || n > dim {
                SmithDecomposition { rank: 0, invariant_factors: Vec::new() }
            } else {
                snf::smith_normal_form_i64(&boundary_i64(k, n))
            }
        })
        .collect();
    let f = k.f_vector();
    let betti = (0..=dim).map(|n| f[n] - decomps[n].rank - decomps[n + 1].rank).collect();
    let torsion = (0..=dim).map(|n| torsion_labels(&decomps[n + 1])).collect();
    HomologyProfile { betti, torsion }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn complex(facets: &[&[i64]]) -> SimplicialComplex {
        SimplicialComplex::from_facets(facets).unwrap()
    }

    #[test]
    fn triangle_boundary_signs() {
        let k = complex(&[&[1, 2, 3]]);
        let b = boundary_matrix(&k, 2).unwrap();
        assert_eq!((b.rows(), b.cols()), (3, 1));
        // rows: [1,2], [1,3], [2,3]; deleting vertex i of [1,2,3] gives sign (-1)^i
        let col: Vec<BigInt> = (0..3).map(|i| b[(i, 0)].clone()).collect();
        assert_eq!(col, vec![BigInt::from(1), BigInt::from(-1), BigInt::from(1)]);
    }

    #[test]
    fn vertex_level_boundary_is_empty() {
        let k = complex(&[&[1, 2, 3]]);
        let b = boundary_matrix(&k, 0).unwrap();
        assert_eq!((b.rows(), b.cols()), (0, 3));
        assert!(boundary_matrix(&k, 3).is_err());
    }

    #[test]
    fn graph_incidence() {
        let k = complex(&[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[2, 3, 4]]);
        let b = boundary_i64(&k, 1);
        assert_eq!((b.rows(), b.cols()), (4, 6));
        for j in 0..6 {
            let col: Vec<i64> = (0..4).map(|i| b[(i, j)]).filter(|v| *v != 0).collect();
            assert_eq!(col, vec![-1, 1]);
        }
    }

    #[test]
    fn boundary_of_boundary_vanishes() {
        let k = complex(&[&[1, 2, 3, 4], &[2, 3, 4, 5], &[1, 5]]);
        for n in 1..3 {
            let p = &boundary_i64(&k, n) * &boundary_i64(&k, n + 1);
            assert!(p.is_zero(), "∂{n}∂{} != 0", n + 1);
        }
    }

    #[test]
    fn figure_complexes() {
        let solid = complex(&[&[1, 2, 3, 4]]);
        let hollow = complex(&[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[2, 3, 4]]);
        let graph = complex(&[&[1, 2], &[1, 3], &[1, 4], &[2, 3], &[2, 4], &[3, 4]]);
        let points = complex(&[&[1], &[2], &[3], &[4]]);
        assert_eq!(homology_profile(&solid).betti, vec![1, 0, 0, 0]);
        assert_eq!(homology_profile(&hollow).betti, vec![1, 0, 1]);
        assert_eq!(homology_profile(&graph).betti, vec![1, 3]);
        assert_eq!(homology_profile(&points).betti, vec![4]);
        assert!(!homology_profile(&hollow).has_torsion());
        assert_eq!(homology_profile(&hollow).torsion_strings(), vec!["", "", ""]);
    }

    #[test]
    fn projective_plane_has_two_torsion() {
        let rp2 = complex(&[
            &[1, 2, 3], &[1, 3, 4], &[1, 4, 5], &[1, 5, 6], &[1, 2, 6],
            &[2, 3, 5], &[2, 4, 5], &[2, 4, 6], &[3, 4, 6], &[3, 5, 6],
        ]);
        let h = homology_profile(&rp2);
        assert_eq!(h.betti, vec![1, 0, 0]);
        assert_eq!(h.torsion, vec![vec![], vec!["Z_2".to_string()], vec![]]);
        assert_eq!(homology(&rp2, 1).unwrap(), (0, vec!["Z_2".to_string()]));
    }

    #[test]
    fn empty_complex_profile() {
        let k = SimplicialComplex::from_simplices(Vec::new());
        assert!(homology_profile(&k).betti.is_empty());
    }
}
