//! Neighborhood operators and feature initializations on simplices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{ComplexError, Simplex, SimplicialComplex};
use crate::homology::{boundary_i64, boundary_matrix, IntegerMatrix, Matrix};
use crate::rng::{fnv1a64, KeyedRng};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("unknown feature kind {0:?}")]
    UnknownKind(String),
    #[error("feature kind {0} needs a seed")]
    MissingSeed(FeatureKind),
    #[error("degree one-hot width {width} too small for vertex degree {degree}")]
    WidthTooSmall { width: usize, degree: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Signed incidence between `k`-simplices and their `(k-1)`-faces.
pub fn signed_incidence(k: &SimplicialComplex, dim: usize) -> Result<IntegerMatrix, ComplexError> {
    boundary_matrix(k, dim)
}

/// `L_k = B_kᵀ B_k + B_{k+1} B_{k+1}ᵀ`.
pub fn hodge_laplacian(k: &SimplicialComplex, dim: usize) -> Result<IntegerMatrix, ComplexError> {
    let top = k.dim();
    if top.map_or(true, |d| dim > d) {
        return Err(ComplexError::DimensionOutOfRange { requested: dim, dim: top });
    }
    let n = k.faces_or_empty(dim).len();
    let mut l = Matrix::<i64>::zeros(n, n);
    if dim > 0 {
        let b = boundary_i64(k, dim);
        add_assign(&mut l, &(&b.transpose() * &b));
    }
    if Some(dim) != top {
        let b = boundary_i64(k, dim + 1);
        add_assign(&mut l, &(&b * &b.transpose()));
    }
    Ok(IntegerMatrix::from(&l))
}

fn add_assign(acc: &mut Matrix<i64>, other: &Matrix<i64>) {
    for i in 0..acc.rows() {
        for j in 0..acc.cols() {
            acc[(i, j)] += other[(i, j)];
        }
    }
}

/// Distinct same-dimension simplices sharing a coface one dimension up.
pub fn upper_adjacent_count(k: &SimplicialComplex, s: &Simplex) -> Result<usize, ComplexError> {
    if !k.contains(s) {
        return Err(ComplexError::UnknownSimplex(s.clone()));
    }
    let neighbours: BTreeSet<Simplex> = k
        .cofaces(s)
        .flat_map(|t| t.boundary_faces())
        .filter(|f| f != s)
        .collect();
    Ok(neighbours.len())
}

/// Distinct same-dimension simplices sharing a face one dimension down.
/// Vertices have no lower neighbours.
pub fn lower_adjacent_count(k: &SimplicialComplex, s: &Simplex) -> Result<usize, ComplexError> {
    if !k.contains(s) {
        return Err(ComplexError::UnknownSimplex(s.clone()));
    }
    if s.dim() == 0 {
        return Ok(0);
    }
    let faces: Vec<Simplex> = s.boundary_faces().collect();
    Ok(k.faces_or_empty(s.dim())
        .iter()
        .filter(|t| *t != s && faces.iter().any(|f| f.is_face_of(t)))
        .count())
}

/// Upper-adjacency counts of all `dim`-simplices in canonical order.
pub fn upper_adjacency_counts(k: &SimplicialComplex, dim: usize) -> Vec<usize> {
    let faces = k.faces_or_empty(dim);
    let mut neighbours: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); faces.len()];
    for t in k.faces_or_empty(dim + 1) {
        let idx: Vec<usize> =
            t.boundary_faces().map(|f| faces.binary_search(&f).expect("closed complex")).collect();
        for &a in &idx {
            neighbours[a].extend(idx.iter().copied().filter(|&b| b != a));
        }
    }
    neighbours.iter().map(BTreeSet::len).collect()
}

/// Lower-adjacency counts of all `dim`-simplices in canonical order.
pub fn lower_adjacency_counts(k: &SimplicialComplex, dim: usize) -> Vec<usize> {
    let faces = k.faces_or_empty(dim);
    if dim == 0 {
        return vec![0; faces.len()];
    }
    let mut by_face: BTreeMap<Simplex, Vec<usize>> = BTreeMap::new();
    for (i, s) in faces.iter().enumerate() {
        for f in s.boundary_faces() {
            by_face.entry(f).or_default().push(i);
        }
    }
    let mut neighbours: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); faces.len()];
    for members in by_face.values() {
        for &a in members {
            neighbours[a].extend(members.iter().copied().filter(|&b| b != a));
        }
    }
    neighbours.iter().map(BTreeSet::len).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    /// One uniform scalar per vertex.
    RandomScalar,
    /// Vertex degree.
    Degree,
    /// One-hot vertex degree.
    DegreeOnehot,
    /// Eight uniform values per simplex, every dimension.
    Random8,
    /// Upper count below the top dimension, lower count at the top.
    ConnectivityIndex,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 5] = [
        FeatureKind::RandomScalar,
        FeatureKind::Degree,
        FeatureKind::DegreeOnehot,
        FeatureKind::Random8,
        FeatureKind::ConnectivityIndex,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::RandomScalar => "random-scalar",
            FeatureKind::Degree => "degree",
            FeatureKind::DegreeOnehot => "degree-onehot",
            FeatureKind::Random8 => "random-8",
            FeatureKind::ConnectivityIndex => "connectivity-index",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(self, FeatureKind::RandomScalar | FeatureKind::Random8)
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureKind {
    type Err = FeatureError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| FeatureError::UnknownKind(s.to_string()))
    }
}

/// Feature matrices keyed by simplex dimension; rows follow canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureAssignment {
    pub kind: FeatureKind,
    pub seed: Option<u64>,
    pub width: usize,
    pub matrices: BTreeMap<usize, Matrix<f64>>,
}

fn column(values: impl IntoIterator<Item = usize>) -> Matrix<f64> {
    let rows: Vec<[f64; 1]> = values.into_iter().map(|v| [v as f64]).collect();
    if rows.is_empty() {
        Matrix::zeros(0, 1)
    } else {
        Matrix::from_rows(&rows)
    }
}

/// Largest vertex degree in the complex.
pub fn max_degree(k: &SimplicialComplex) -> usize {
    upper_adjacency_counts(k, 0).into_iter().max().unwrap_or(0)
}

/// Builds one feature assignment. `record_id` keys the random stream;
/// `onehot_width` overrides the per-complex one-hot width (batch maximum).
pub fn make_features(
    k: &SimplicialComplex,
    kind: FeatureKind,
    seed: Option<u64>,
    record_id: &str,
    onehot_width: Option<usize>,
) -> Result<FeatureAssignment, FeatureError> {
    if kind.is_random() && seed.is_none() {
        return Err(FeatureError::MissingSeed(kind));
    }
    let top = k.dim().unwrap_or(0);
    let mut matrices = BTreeMap::new();
    let width = match kind {
        FeatureKind::Degree => {
            matrices.insert(0, column(upper_adjacency_counts(k, 0)));
            1
        }
        FeatureKind::DegreeOnehot => {
            let degrees = upper_adjacency_counts(k, 0);
            let max = degrees.iter().copied().max().unwrap_or(0);
            let width = onehot_width.unwrap_or(max + 1);
            if max >= width {
                return Err(FeatureError::WidthTooSmall { width, degree: max });
            }
            let mut m = Matrix::zeros(degrees.len(), width);
            for (i, d) in degrees.into_iter().enumerate() {
                m[(i, d)] = 1.0;
            }
            matrices.insert(0, m);
            width
        }
        FeatureKind::ConnectivityIndex => {
            if !k.is_empty() {
                for d in 0..=top {
                    let counts = if d < top {
                        upper_adjacency_counts(k, d)
                    } else {
                        lower_adjacency_counts(k, d)
                    };
                    matrices.insert(d, column(counts));
                }
            }
            1
        }
        FeatureKind::RandomScalar | FeatureKind::Random8 => {
            let (dims, width) = if kind == FeatureKind::RandomScalar { (0..=0, 1) } else { (0..=top, 8) };
            let rng = KeyedRng::new(seed.expect("checked above"), fnv1a64(record_id.as_bytes()));
            // Simplex index is global: dimension-major canonical position.
            let mut offset = 0u64;
            for d in 0..=top {
                let n = k.faces_or_empty(d).len();
                if dims.contains(&d) && !k.is_empty() {
                    let mut m = Matrix::zeros(n, width);
                    for i in 0..n {
                        for c in 0..width {
                            let idx = (offset + i as u64) * width as u64 + c as u64;
                            m[(i, c)] = KeyedRng::unit_f64(rng.at(idx));
                        }
                    }
                    matrices.insert(d, m);
                }
                offset += n as u64;
            }
            width
        }
    };
    Ok(FeatureAssignment { kind, seed, width, matrices })
}

/// Features for a batch. The one-hot width is the batch maximum degree + 1.
pub fn make_features_batch(
    items: &[(&str, &SimplicialComplex)],
    kind: FeatureKind,
    seed: Option<u64>,
) -> Result<Vec<FeatureAssignment>, FeatureError> {
    let width = (kind == FeatureKind::DegreeOnehot)
        .then(|| items.par_iter().map(|(_, k)| max_degree(k)).max().unwrap_or(0) + 1);
    items
        .par_iter()
        .map(|(id, k)| make_features(k, kind, seed, id, width))
        .collect()
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct FeatureSidecar {
    pub kind: FeatureKind,
    pub seed: Option<u64>,
    pub width: usize,
    pub dimensions: Vec<usize>,
    pub records: usize,
    pub files: Vec<String>,
}

/// Writes `features_dim{d}.csv` per populated dimension plus `features.json`.
///
/// CSV columns: `record_id,simplex,f0,f1,...`; simplices are written as
/// dash-joined vertex ids.
pub fn write_features(
    dir: &Path,
    items: &[(&str, &SimplicialComplex, &FeatureAssignment)],
) -> Result<FeatureSidecar, FeatureError> {
    std::fs::create_dir_all(dir)?;
    let first = items.first().map(|(_, _, f)| *f);
    let kind = first.map_or(FeatureKind::Degree, |f| f.kind);
    let seed = first.and_then(|f| f.seed);
    let width = items.iter().map(|(_, _, f)| f.width).max().unwrap_or(0);
    let dims: BTreeSet<usize> = items.iter().flat_map(|(_, _, f)| f.matrices.keys().copied()).collect();

    let mut files = Vec::new();
    for &d in &dims {
        let name = format!("features_dim{d}.csv");
        let mut w = io::BufWriter::new(std::fs::File::create(dir.join(&name))?);
        write!(w, "record_id,simplex")?;
        for c in 0..width {
            write!(w, ",f{c}")?;
        }
        writeln!(w)?;
        for (id, k, f) in items {
            let Some(m) = f.matrices.get(&d) else { continue };
            for (i, s) in k.faces_or_empty(d).iter().enumerate() {
                let verts: Vec<String> = s.vertices().iter().map(u32::to_string).collect();
                write!(w, "{id},{}", verts.join("-"))?;
                for c in 0..m.cols() {
                    // `{}` on f64 is the shortest round-trip representation.
                    write!(w, ",{}", m[(i, c)])?;
                }
                writeln!(w)?;
            }
        }
        w.flush()?;
        files.push(name);
    }
    let sidecar = FeatureSidecar {
        kind,
        seed,
        width,
        dimensions: dims.into_iter().collect(),
        records: items.len(),
        files,
    };
    let json = serde_json::to_string_pretty(&sidecar).map_err(io::Error::other)?;
    std::fs::write(dir.join("features.json"), json + "\n")?;
    Ok(sidecar)
}
