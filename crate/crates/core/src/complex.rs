//! Finite abstract simplicial complexes stored as an eagerly closed face set.
//!
//! Vertex ids are the positive integers used by the raw data. Every simplex
//! keeps its vertices sorted ascending, and the faces of each dimension are
//! kept in lexicographic order. That order is the canonical row/column order
//! used by the boundary matrices and by every other derived structure.

use std::collections::BTreeSet;
use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

/// Vertex identifier as it appears in the raw data (1-based).
pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("facet {index} is empty")]
    EmptyFacet { index: usize },
    #[error("facet {index} contains non-positive vertex id {value}")]
    NonPositiveVertexId { index: usize, value: i64 },
    #[error("facet {index} repeats vertex {vertex}")]
    RepeatedVertex { index: usize, vertex: VertexId },
    #[error("dimension {requested} out of range (complex has dimension {dim:?})")]
    DimensionOutOfRange { requested: usize, dim: Option<usize> },
    #[error("simplex {0} is not in the complex")]
    UnknownSimplex(Simplex),
    #[error("vertex {0} is not in the complex")]
    UnknownVertex(VertexId),
}

/// A simplex given by its strictly increasing vertex ids.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex(SmallVec<[VertexId; 4]>);

impl Simplex {
    /// Builds a simplex from arbitrary-order vertices.
    ///
    /// Returns `None` when the list is empty or repeats a vertex.
    pub fn new(vertices: impl IntoIterator<Item = VertexId>) -> Option<Self> {
        let mut v: SmallVec<[VertexId; 4]> = vertices.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(Simplex(v))
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// True if every vertex of `self` is a vertex of `other`.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    /// The face obtained by deleting the `i`-th smallest vertex.
    ///
    /// Panics for a vertex (there is no empty simplex).
    pub fn delete(&self, i: usize) -> Simplex {
        assert!(self.0.len() > 1, "a vertex has no codimension-1 faces");
        let mut v = self.0.clone();
        v.remove(i);
        Simplex(v)
    }

    /// Codimension-1 faces in deletion order `i = 0..=dim`.
    pub fn boundary_faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |i| self.delete(i))
    }

    /// The simplex with `v` removed, or `None` if `v` is absent or the
    /// result would be empty.
    pub fn without(&self, v: VertexId) -> Option<Simplex> {
        let pos = self.0.binary_search(&v).ok()?;
        (self.0.len() > 1).then(|| self.delete(pos))
    }

    /// Union with a vertex not already present.
    pub fn with(&self, v: VertexId) -> Simplex {
        let mut out = self.0.clone();
        match out.binary_search(&v) {
            Ok(_) => {}
            Err(pos) => out.insert(pos, v),
        }
        Simplex(out)
    }

    /// All non-empty subsets, including `self`.
    pub fn faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = self.0.len();
        (1u32..(1u32 << n)).map(move |mask| {
            Simplex(
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.0[i])
                    .collect(),
            )
        })
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

/// An immutable, downward-closed set of simplices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimplicialComplex {
    faces_by_dim: Vec<Vec<Simplex>>,
    facets: Vec<Simplex>,
}

impl SimplicialComplex {
    /// Builds the closure of a facet list.
    ///
    /// Facet vertex order does not matter, duplicates collapse, and inputs
    /// contained in other inputs are absorbed. An empty list gives the empty
    /// complex.
    pub fn from_facets<I, F>(facets: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = F>,
        F: AsRef<[i64]>,
    {
        let mut simplices = Vec::new();
        for (index, facet) in facets.into_iter().enumerate() {
            let raw = facet.as_ref();
            if raw.is_empty() {
                return Err(ComplexError::EmptyFacet { index });
            }
            let mut verts = SmallVec::<[VertexId; 4]>::with_capacity(raw.len());
            for &value in raw {
                if value <= 0 || value > VertexId::MAX as i64 {
                    return Err(ComplexError::NonPositiveVertexId { index, value });
                }
                verts.push(value as VertexId);
            }
            verts.sort_unstable();
            if let Some(w) = verts.windows(2).find(|w| w[0] == w[1]) {
                return Err(ComplexError::RepeatedVertex { index, vertex: w[0] });
            }
            simplices.push(Simplex(verts));
        }
        Ok(Self::from_simplices(simplices))
    }

    /// Builds the closure of already-valid simplices.
    pub fn from_simplices(simplices: impl IntoIterator<Item = Simplex>) -> Self {
        let mut by_dim: Vec<BTreeSet<Simplex>> = Vec::new();
        let mut inputs: BTreeSet<Simplex> = BTreeSet::new();
        for s in simplices {
            inputs.insert(s);
        }
        for s in &inputs {
            for face in s.faces() {
                let d = face.dim();
                if by_dim.len() <= d {
                    by_dim.resize_with(d + 1, BTreeSet::new);
                }
                by_dim[d].insert(face);
            }
        }
        let faces_by_dim: Vec<Vec<Simplex>> =
            by_dim.into_iter().map(|set| set.into_iter().collect()).collect();

        // A simplex is maximal iff it is not a boundary face of anything one
        // dimension up.
        let mut facets = Vec::new();
        for (d, faces) in faces_by_dim.iter().enumerate() {
            let mut covered = vec![false; faces.len()];
            if let Some(up) = faces_by_dim.get(d + 1) {
                for t in up {
                    for face in t.boundary_faces() {
                        if let Ok(i) = faces.binary_search(&face) {
                            covered[i] = true;
                        }
                    }
                }
            }
            facets.extend(
                faces.iter().zip(&covered).filter(|(_, c)| !**c).map(|(s, _)| s.clone()),
            );
        }
        facets.sort();
        SimplicialComplex { faces_by_dim, facets }
    }

    pub fn is_empty(&self) -> bool {
        self.faces_by_dim.is_empty()
    }

    /// Dimension of the complex, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.faces_by_dim.len().checked_sub(1)
    }

    /// Maximal simplices, sorted by (vertex sequence).
    pub fn facets(&self) -> &[Simplex] {
        &self.facets
    }

    /// Facets as plain vertex-id lists, in canonical order.
    pub fn facet_lists(&self) -> Vec<Vec<VertexId>> {
        self.facets.iter().map(|s| s.vertices().to_vec()).collect()
    }

    pub fn k_faces(&self, k: usize) -> Result<&[Simplex], ComplexError> {
        self.faces_by_dim
            .get(k)
            .map(Vec::as_slice)
            .ok_or(ComplexError::DimensionOutOfRange { requested: k, dim: self.dim() })
    }

    /// Faces of dimension `k`, or an empty slice outside `0..=dim`.
    pub(crate) fn faces_or_empty(&self, k: usize) -> &[Simplex] {
        self.faces_by_dim.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All simplices, dimension-major then lexicographic.
    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.faces_by_dim.iter().flatten()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.faces_or_empty(0).iter().map(|s| s.vertices()[0])
    }

    pub fn n_vertices(&self) -> usize {
        self.faces_or_empty(0).len()
    }

    /// Canonical position of `s` within its dimension.
    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.faces_by_dim.get(s.dim())?.binary_search(s).ok()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    /// Dense 0-based index of a vertex id.
    pub fn vertex_index(&self, v: VertexId) -> Option<usize> {
        self.faces_or_empty(0)
            .binary_search_by(|s| s.vertices()[0].cmp(&v))
            .ok()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.faces_by_dim.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(k, &f)| if k % 2 == 0 { f as i64 } else { -(f as i64) })
            .sum()
    }

    /// True if every facet has dimension `dim()`.
    pub fn is_pure(&self) -> bool {
        match self.dim() {
            Some(d) => self.facets.iter().all(|f| f.dim() == d),
            None => true,
        }
    }

    /// Number of connected components of the 1-skeleton.
    pub fn connected_components(&self) -> usize {
        let n = self.n_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = n;
        for e in self.faces_or_empty(1) {
            let a = self.vertex_index(e.vertices()[0]).expect("closed complex");
            let b = self.vertex_index(e.vertices()[1]).expect("closed complex");
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components() == 1
    }

    /// Simplices of dimension `dim + 1` containing `s`.
    pub fn cofaces<'a>(&'a self, s: &'a Simplex) -> impl Iterator<Item = &'a Simplex> + 'a {
        self.faces_or_empty(s.dim() + 1)
            .iter()
            .filter(move |t| s.is_face_of(t))
    }

    /// Applies a vertex relabeling; `map` must be injective on the vertex set.
    pub fn relabel(&self, map: impl Fn(VertexId) -> VertexId) -> SimplicialComplex {
        let facets = self.facets.iter().map(|f| {
            Simplex::new(f.vertices().iter().map(|&v| map(v))).expect("injective relabeling")
        });
        SimplicialComplex::from_simplices(facets.collect::<Vec<_>>())
    }
}
