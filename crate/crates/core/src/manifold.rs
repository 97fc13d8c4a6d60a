//! Combinatorial verification of closed 2- and 3-manifolds.
//!
//! A pure complex of dimension `d` is accepted when every `(d-1)`-face lies in
//! exactly two facets, the 1-skeleton is connected, and the links are right:
//! vertex links of a surface are single cycles; for a 3-manifold every vertex
//! link is a closed connected surface with Euler characteristic 2 (hence a
//! 2-sphere) and every edge link is a single cycle.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{ComplexError, Simplex, SimplicialComplex, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManifoldError {
    #[error("unsupported dimension {0:?}: only closed 2- and 3-manifolds are handled")]
    UnsupportedDimension(Option<usize>),
    #[error("complex is not pure: facet {0} has lower dimension")]
    NotPure(Simplex),
    #[error("complex is not a closed connected combinatorial manifold")]
    NotAManifold,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Why a simplex fails the manifold test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum WitnessReason {
    /// A codimension-1 face in the wrong number of facets.
    FacetCount { count: usize },
    /// A facet of lower dimension than the complex.
    NotPure,
    /// The vertex link of a surface vertex is not one cycle.
    VertexLinkNotCycle,
    /// The vertex link of a 3-manifold vertex is not a 2-sphere.
    VertexLinkNotSphere,
    /// The edge link of a 3-manifold edge is not one cycle.
    EdgeLinkNotCycle,
    /// The complex has more than one connected component.
    Disconnected { components: usize },
}

impl fmt::Display for WitnessReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessReason::FacetCount { count } => write!(f, "facet_count={count}"),
            WitnessReason::NotPure => f.write_str("not_pure"),
            WitnessReason::VertexLinkNotCycle => f.write_str("vertex_link_not_cycle"),
            WitnessReason::VertexLinkNotSphere => f.write_str("vertex_link_not_sphere"),
            WitnessReason::EdgeLinkNotCycle => f.write_str("edge_link_not_cycle"),
            WitnessReason::Disconnected { components } => write!(f, "disconnected={components}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "serialize_simplex")]
    pub simplex: Simplex,
    #[serde(flatten)]
    pub reason: WitnessReason,
}

fn serialize_simplex<S: serde::Serializer>(s: &Simplex, ser: S) -> Result<S::Ok, S::Error> {
    ser.collect_seq(s.vertices())
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.simplex, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifoldReport {
    pub dimension: usize,
    pub is_closed_pseudomanifold: bool,
    pub is_connected: bool,
    pub links_ok: bool,
    pub is_manifold: bool,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceClass {
    pub orientable: bool,
    pub genus: u32,
    /// One of `S^2`, `T^2`, `RP^2`, `Klein bottle`, or empty.
    pub name: String,
}

/// Homeomorphism names recognized for closed surfaces.
pub fn surface_name(orientable: bool, genus: u32) -> &'static str {
    match (orientable, genus) {
        (true, 0) => "S^2",
        (true, 1) => "T^2",
        (false, 1) => "RP^2",
        (false, 2) => "Klein bottle",
        _ => "",
    }
}

fn supported_dim(k: &SimplicialComplex) -> Result<usize, ManifoldError> {
    match k.dim() {
        Some(d @ (2 | 3)) => Ok(d),
        other => Err(ManifoldError::UnsupportedDimension(other)),
    }
}

/// Number of facets containing each `(d-1)`-face, in canonical order.
fn ridge_counts(k: &SimplicialComplex, d: usize) -> Vec<usize> {
    let ridges = k.faces_or_empty(d - 1);
    let mut counts = vec![0usize; ridges.len()];
    for facet in k.faces_or_empty(d) {
        for face in facet.boundary_faces() {
            let i = ridges.binary_search(&face).expect("closed complex");
            counts[i] += 1;
        }
    }
    counts
}

/// Checks that every codimension-1 face lies in exactly two facets.
pub fn is_closed_pseudomanifold(k: &SimplicialComplex) -> Result<(bool, Vec<Witness>), ManifoldError> {
    let d = supported_dim(k)?;
    if let Some(low) = k.facets().iter().find(|f| f.dim() < d) {
        return Err(ManifoldError::NotPure(low.clone()));
    }
    Ok(pseudomanifold_witnesses(k, d))
}

fn pseudomanifold_witnesses(k: &SimplicialComplex, d: usize) -> (bool, Vec<Witness>) {
    let witnesses: Vec<Witness> = k
        .faces_or_empty(d - 1)
        .iter()
        .zip(ridge_counts(k, d))
        .filter(|(_, c)| *c != 2)
        .map(|(s, count)| Witness { simplex: s.clone(), reason: WitnessReason::FacetCount { count } })
        .collect();
    (witnesses.is_empty(), witnesses)
}

/// Link of a simplex: faces `τ` disjoint from `σ` with `τ ∪ σ` in `K`.
pub fn link(k: &SimplicialComplex, sigma: &Simplex) -> Result<SimplicialComplex, ComplexError> {
    if !k.contains(sigma) {
        return Err(ComplexError::UnknownSimplex(sigma.clone()));
    }
    let pieces = k
        .facets()
        .iter()
        .filter(|f| sigma.is_face_of(f))
        .filter_map(|f| Simplex::new(f.vertices().iter().copied().filter(|v| !sigma.contains(*v))));
    Ok(SimplicialComplex::from_simplices(pieces.collect::<Vec<_>>()))
}

pub fn vertex_link(k: &SimplicialComplex, v: VertexId) -> Result<SimplicialComplex, ComplexError> {
    let s = Simplex::new([v]).expect("single vertex");
    link(k, &s).map_err(|_| ComplexError::UnknownVertex(v))
}

/// A single cycle: pure 1-dimensional, connected, every vertex of degree 2.
fn is_cycle(l: &SimplicialComplex) -> bool {
    if l.dim() != Some(1) || !l.is_pure() || !l.is_connected() {
        return false;
    }
    let f = l.f_vector();
    if f[0] != f[1] || f[0] < 3 {
        return false;
    }
    let mut degree: HashMap<VertexId, usize> = HashMap::new();
    for e in l.faces_or_empty(1) {
        for &v in e.vertices() {
            *degree.entry(v).or_default() += 1;
        }
    }
    degree.values().all(|&d| d == 2)
}

/// Closed connected surface with every vertex link a cycle.
fn is_surface(l: &SimplicialComplex) -> bool {
    l.dim() == Some(2)
        && l.is_pure()
        && pseudomanifold_witnesses(l, 2).0
        && l.is_connected()
        && l.vertex_ids().all(|v| is_cycle(&vertex_link(l, v).expect("vertex of l")))
}

fn is_two_sphere(l: &SimplicialComplex) -> bool {
    is_surface(l) && l.euler_characteristic() == 2
}

pub fn is_combinatorial_manifold(k: &SimplicialComplex) -> Result<ManifoldReport, ManifoldError> {
    let d = supported_dim(k)?;
    let mut witnesses = Vec::new();

    let impure: Vec<Witness> = k
        .facets()
        .iter()
        .filter(|f| f.dim() < d)
        .map(|f| Witness { simplex: f.clone(), reason: WitnessReason::NotPure })
        .collect();
    let pure = impure.is_empty();
    witnesses.extend(impure);

    let (closed, ridge_witnesses) = pseudomanifold_witnesses(k, d);
    witnesses.extend(ridge_witnesses);
    let closed = closed && pure;

    let components = k.connected_components();
    let is_connected = components == 1;
    if !is_connected {
        let first = k.faces_or_empty(0)[0].clone();
        witnesses.push(Witness { simplex: first, reason: WitnessReason::Disconnected { components } });
    }

    let mut links_ok = true;
    for v in k.faces_or_empty(0) {
        let l = link(k, v)?;
        let ok = if d == 2 { is_cycle(&l) } else { is_two_sphere(&l) };
        if !ok {
            links_ok = false;
            let reason =
                if d == 2 { WitnessReason::VertexLinkNotCycle } else { WitnessReason::VertexLinkNotSphere };
            witnesses.push(Witness { simplex: v.clone(), reason });
        }
    }
    if d == 3 {
        for e in k.faces_or_empty(1) {
            if !is_cycle(&link(k, e)?) {
                links_ok = false;
                witnesses.push(Witness { simplex: e.clone(), reason: WitnessReason::EdgeLinkNotCycle });
            }
        }
    }

    let is_manifold = closed && is_connected && links_ok;
    Ok(ManifoldReport {
        dimension: d,
        is_closed_pseudomanifold: closed,
        is_connected,
        links_ok,
        is_manifold,
        witnesses,
    })
}

/// Tries to orient all facets coherently starting from facet `start`.
///
/// Returns the orientation sign of every top simplex (relative to ascending
/// vertex order) or `None` when propagation hits a contradiction. Requires a
/// closed pure complex; disconnected pieces are oriented independently.
pub fn coherent_orientation(k: &SimplicialComplex, start: usize) -> Option<Vec<i8>> {
    let d = k.dim()?;
    let tops = k.faces_or_empty(d);
    if d == 0 || tops.is_empty() {
        return Some(vec![1; tops.len()]);
    }
    // For each ridge, the (facet, deletion index) pairs that contain it.
    let mut ridge_facets: HashMap<Simplex, Vec<(usize, usize)>> = HashMap::new();
    for (fi, facet) in tops.iter().enumerate() {
        for (i, face) in facet.boundary_faces().enumerate() {
            ridge_facets.entry(face).or_default().push((fi, i));
        }
    }
    let mut sign: Vec<i8> = vec![0; tops.len()];
    let order = std::iter::once(start % tops.len()).chain(0..tops.len());
    for root in order {
        if sign[root] != 0 {
            continue;
        }
        sign[root] = 1;
        let mut queue = VecDeque::from([root]);
        while let Some(fi) = queue.pop_front() {
            for (i, face) in tops[fi].boundary_faces().enumerate() {
                // Induced orientation on the ridge is sign * (-1)^i; the
                // neighbour must induce the opposite one.
                let induced = sign[fi] * if i % 2 == 0 { 1 } else { -1 };
                for &(gi, j) in &ridge_facets[&face] {
                    if gi == fi {
                        continue;
                    }
                    let needed = -induced * if j % 2 == 0 { 1 } else { -1 };
                    if sign[gi] == 0 {
                        sign[gi] = needed;
                        queue.push_back(gi);
                    } else if sign[gi] != needed {
                        return None;
                    }
                }
            }
        }
    }
    Some(sign)
}

/// Orientability of a verified closed connected manifold.
pub fn orientability(k: &SimplicialComplex) -> Result<bool, ManifoldError> {
    if !is_combinatorial_manifold(k)?.is_manifold {
        return Err(ManifoldError::NotAManifold);
    }
    Ok(coherent_orientation(k, 0).is_some())
}

/// Classification of a verified closed connected surface.
pub fn classify_surface(k: &SimplicialComplex) -> Result<SurfaceClass, ManifoldError> {
    if k.dim() != Some(2) {
        return Err(ManifoldError::UnsupportedDimension(k.dim()));
    }
    let orientable = orientability(k)?;
    Ok(surface_class_from(k.euler_characteristic(), orientable))
}

/// Genus and name from Euler characteristic and orientability.
pub(crate) fn surface_class_from(chi: i64, orientable: bool) -> SurfaceClass {
    let genus = if orientable { (2 - chi) / 2 } else { 2 - chi };
    let genus = u32::try_from(genus).expect("closed surfaces have χ <= 2");
    SurfaceClass { orientable, genus, name: surface_name(orientable, genus).to_string() }
}
