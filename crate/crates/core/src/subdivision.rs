//! Barycentric subdivision.
//!
//! Every simplex of the input becomes a vertex of `Sd(K)`; ids are handed out
//! 1, 2, 3, ... in the canonical order of the input (dimension-major, then
//! lexicographic). Simplices of `Sd(K)` are chains of strictly nested input
//! simplices.

use std::collections::HashMap;

use crate::complex::{Simplex, SimplicialComplex, VertexId};

/// Input simplex → vertex of the subdivision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubdivisionMap {
    new_vertex_of: HashMap<Simplex, VertexId>,
}

impl SubdivisionMap {
    pub fn vertex_of(&self, s: &Simplex) -> Option<VertexId> {
        self.new_vertex_of.get(s).copied()
    }

    pub fn len(&self) -> usize {
        self.new_vertex_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.new_vertex_of.is_empty()
    }
}

/// Maximal chains `σ_0 ⊂ σ_1 ⊂ ... ⊂ facet`, built by deleting one vertex at
/// a time from the facet.
fn maximal_chains(facet: &Simplex, out: &mut Vec<Vec<Simplex>>, prefix: &mut Vec<Simplex>) {
    prefix.push(facet.clone());
    if facet.dim() == 0 {
        out.push(prefix.clone());
    } else {
        for face in facet.boundary_faces() {
            maximal_chains(&face, out, prefix);
        }
    }
    prefix.pop();
}

pub fn barycentric_subdivision(k: &SimplicialComplex) -> (SimplicialComplex, SubdivisionMap) {
    let new_vertex_of: HashMap<Simplex, VertexId> = k
        .simplices()
        .enumerate()
        .map(|(i, s)| (s.clone(), VertexId::try_from(i + 1).expect("vertex id fits in u32")))
        .collect();

    let mut top = Vec::new();
    let mut chains = Vec::new();
    for facet in k.facets() {
        chains.clear();
        maximal_chains(facet, &mut chains, &mut Vec::new());
        for chain in &chains {
            let s = Simplex::new(chain.iter().map(|c| new_vertex_of[c])).expect("chain ids distinct");
            top.push(s);
        }
    }
    (SimplicialComplex::from_simplices(top), SubdivisionMap { new_vertex_of })
}
