//! Small known triangulations and random moves that keep a triangulation a
//! combinatorial manifold. Used by the test suites and handy for experiments.

use std::collections::BTreeSet;

use crate::complex::{Simplex, SimplicialComplex, VertexId};
use crate::rng::KeyedRng;

fn build(facets: &[&[i64]]) -> SimplicialComplex {
    SimplicialComplex::from_facets(facets).expect("valid sample facets")
}

fn build_vec(facets: Vec<Vec<VertexId>>) -> SimplicialComplex {
    SimplicialComplex::from_simplices(facets.into_iter().map(|f| Simplex::new(f).expect("valid facet")))
}

/// The solid tetrahedron.
pub fn solid_tetrahedron() -> SimplicialComplex {
    build(&[&[1, 2, 3, 4]])
}

/// Boundary of the tetrahedron, the 4-vertex 2-sphere.
pub fn tetrahedron_boundary() -> SimplicialComplex {
    build(&[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[2, 3, 4]])
}

/// 1-skeleton of the tetrahedron.
pub fn tetrahedron_graph() -> SimplicialComplex {
    build(&[&[1, 2], &[1, 3], &[1, 4], &[2, 3], &[2, 4], &[3, 4]])
}

pub fn four_points() -> SimplicialComplex {
    build(&[&[1], &[2], &[3], &[4]])
}

pub fn octahedron() -> SimplicialComplex {
    build(&[&[1, 2, 3], &[1, 3, 4], &[1, 4, 5], &[1, 2, 5], &[6, 2, 3], &[6, 3, 4], &[6, 4, 5], &[6, 2, 5]])
}

/// The 6-vertex real projective plane.
pub fn rp2() -> SimplicialComplex {
    build(&[
        &[1, 2, 3],
        &[1, 3, 4],
        &[1, 4, 5],
        &[1, 5, 6],
        &[1, 2, 6],
        &[2, 3, 5],
        &[2, 4, 5],
        &[2, 4, 6],
        &[3, 4, 6],
        &[3, 5, 6],
    ])
}

/// Möbius's 7-vertex torus: triangles `{i, i+1, i+3}` and `{i, i+2, i+3}` mod 7.
pub fn torus() -> SimplicialComplex {
    let mut facets = Vec::new();
    for i in 0..7u32 {
        facets.push(vec![i + 1, (i + 1) % 7 + 1, (i + 3) % 7 + 1]);
        facets.push(vec![i + 1, (i + 2) % 7 + 1, (i + 3) % 7 + 1]);
    }
    build_vec(facets)
}

/// Boundary of the 4-simplex, the 5-vertex 3-sphere.
pub fn boundary_4_simplex() -> SimplicialComplex {
    build(&[&[1, 2, 3, 4], &[1, 2, 3, 5], &[1, 2, 4, 5], &[1, 3, 4, 5], &[2, 3, 4, 5]])
}

/// Connected sum along the first facet of each summand.
///
/// The first facet of `b` is identified with the first facet of `a`, both
/// are removed, and the remaining vertices of `b` get fresh ids.
pub fn connected_sum(a: &SimplicialComplex, b: &SimplicialComplex) -> SimplicialComplex {
    let fa = a.facets()[0].clone();
    let fb = b.facets()[0].clone();
    assert_eq!(fa.dim(), fb.dim(), "summands must have equal dimension");
    let offset = a.vertex_ids().max().unwrap_or(0);
    let map = |v: VertexId| match fb.vertices().iter().position(|&w| w == v) {
        Some(i) => fa.vertices()[i],
        None => v + offset,
    };
    let top = fa.dim();
    let mut out: Vec<Simplex> = a.facets().iter().filter(|f| **f != fa).cloned().collect();
    out.extend(
        b.facets()
            .iter()
            .filter(|f| **f != fb)
            .map(|f| Simplex::new(f.vertices().iter().map(|&v| map(v))).expect("map is injective")),
    );
    debug_assert!(out.iter().all(|f| f.dim() == top));
    compact(&SimplicialComplex::from_simplices(out))
}

/// Renumbers vertices to `1..=n` preserving their order.
pub fn compact(k: &SimplicialComplex) -> SimplicialComplex {
    let ids: Vec<VertexId> = k.vertex_ids().collect();
    k.relabel(|v| ids.binary_search(&v).expect("known vertex") as VertexId + 1)
}

pub fn klein_bottle() -> SimplicialComplex {
    connected_sum(&rp2(), &rp2())
}

/// Orientable closed surface of genus `g`.
pub fn orientable_surface(g: u32) -> SimplicialComplex {
    if g == 0 {
        return tetrahedron_boundary();
    }
    let mut k = torus();
    for _ in 1..g {
        k = connected_sum(&k, &torus());
    }
    k
}

/// Non-orientable closed surface with `g >= 1` cross-caps.
pub fn nonorientable_surface(g: u32) -> SimplicialComplex {
    assert!(g >= 1, "at least one cross-cap");
    let mut k = rp2();
    for _ in 1..g {
        k = connected_sum(&k, &rp2());
    }
    k
}

/// `S^2 × S^1` (or the twisted bundle) as `∂Δ³ × C_3`, each prism split by
/// the staircase rule. The twisted version glues the last layer back with
/// a reflection of the sphere.
fn sphere_bundle(twisted: bool) -> SimplicialComplex {
    const LAYERS: u32 = 3;
    let id = |v: u32, layer: u32| layer * 4 + v + 1;
    let reflect = |v: u32| match v {
        0 => 1,
        1 => 0,
        v => v,
    };
    let mut facets = Vec::new();
    for t in 0..LAYERS {
        let next = (t + 1) % LAYERS;
        let up = |v: u32| if twisted && next == 0 { reflect(v) } else { v };
        for tri in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
            let [a, b, c] = tri;
            facets.push(vec![id(a, t), id(b, t), id(c, t), id(up(c), next)]);
            facets.push(vec![id(a, t), id(b, t), id(up(b), next), id(up(c), next)]);
            facets.push(vec![id(a, t), id(up(a), next), id(up(b), next), id(up(c), next)]);
        }
    }
    build_vec(facets)
}

pub fn s2_x_s1() -> SimplicialComplex {
    sphere_bundle(false)
}

pub fn s2_twist_s1() -> SimplicialComplex {
    sphere_bundle(true)
}

fn fresh_vertex(k: &SimplicialComplex) -> VertexId {
    k.vertex_ids().max().unwrap_or(0) + 1
}

/// Replaces a random facet by the cone over its boundary from a new vertex
/// (the 1-3 move on surfaces, 1-4 on 3-manifolds).
pub fn stellar_move(k: &SimplicialComplex, rng: &mut KeyedRng) -> SimplicialComplex {
    let facets = k.facets();
    let target = facets[rng.below(facets.len() as u64) as usize].clone();
    let n = fresh_vertex(k);
    let mut out: Vec<Simplex> = facets.iter().filter(|f| **f != target).cloned().collect();
    out.extend(target.boundary_faces().map(|face| face.with(n)));
    SimplicialComplex::from_simplices(out)
}

/// Bistellar flip across a random interior codimension-1 face: the 2-2 edge
/// flip on surfaces and the 2-3 move on 3-manifolds. Returns `None` when no
/// attempt among a few tries is admissible.
pub fn flip_move(k: &SimplicialComplex, rng: &mut KeyedRng) -> Option<SimplicialComplex> {
    let d = k.dim()?;
    let ridges = k.faces_or_empty(d - 1);
    for _ in 0..16 {
        let ridge = &ridges[rng.below(ridges.len() as u64) as usize];
        let apexes: Vec<VertexId> = k
            .cofaces(ridge)
            .filter(|s| s.dim() == d)
            .map(|s| *s.vertices().iter().find(|v| !ridge.contains(**v)).expect("coface has an extra vertex"))
            .collect();
        let [p, q] = apexes[..] else { continue };
        let new_face = Simplex::new([p, q]).expect("distinct apexes");
        // The new simplex must not already exist; for surfaces that is the
        // edge pq, for 3-manifolds also the edge pq.
        if k.contains(&new_face) {
            continue;
        }
        let old: BTreeSet<Simplex> = [ridge.with(p), ridge.with(q)].into();
        let mut out: Vec<Simplex> = k.facets().iter().filter(|f| !old.contains(*f)).cloned().collect();
        for v in ridge.vertices() {
            let rest = ridge.without(*v).expect("ridge has at least two vertices");
            out.push(rest.with(p).with(q));
        }
        return Some(SimplicialComplex::from_simplices(out));
    }
    None
}

/// Applies `steps` random flips and stellar moves, stopping stellar moves
/// once the complex reaches `max_vertices`.
pub fn randomize(k: &SimplicialComplex, rng: &mut KeyedRng, steps: usize, max_vertices: usize) -> SimplicialComplex {
    let mut cur = k.clone();
    for _ in 0..steps {
        let stellar = cur.n_vertices() < max_vertices && rng.below(3) == 0;
        if stellar {
            cur = stellar_move(&cur, rng);
        } else if let Some(next) = flip_move(&cur, rng) {
            cur = next;
        }
    }
    compact(&cur)
}

/// Random pure or mixed complex on at most `max_vertices` vertices with
/// facets of dimension at most `max_dim`.
pub fn random_complex(rng: &mut KeyedRng, max_vertices: u32, max_dim: usize) -> SimplicialComplex {
    let n = 1 + rng.below(u64::from(max_vertices)) as u32;
    let count = 1 + rng.below(8) as usize;
    let mut facets = Vec::with_capacity(count);
    for _ in 0..count {
        let size = 1 + rng.below((max_dim as u64 + 1).min(u64::from(n))) as usize;
        let mut vs: Vec<VertexId> = (1..=n).collect();
        rng.shuffle(&mut vs);
        vs.truncate(size);
        facets.push(Simplex::new(vs).expect("distinct vertices"));
    }
    SimplicialComplex::from_simplices(facets)
}

/// Base surfaces with their expected (orientable, genus).
pub fn base_surfaces() -> Vec<(SimplicialComplex, bool, u32)> {
    vec![
        (tetrahedron_boundary(), true, 0),
        (octahedron(), true, 0),
        (torus(), true, 1),
        (orientable_surface(2), true, 2),
        (rp2(), false, 1),
        (klein_bottle(), false, 2),
        (nonorientable_surface(3), false, 3),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::homology_profile;
    use crate::manifold::{classify_surface, is_combinatorial_manifold, orientability};

    #[test]
    fn base_surfaces_classify() {
        for (k, orientable, genus) in base_surfaces() {
            let c = classify_surface(&k).unwrap();
            assert_eq!((c.orientable, c.genus), (orientable, genus), "{:?}", k.facet_lists());
        }
        assert_eq!(classify_surface(&klein_bottle()).unwrap().name, "Klein bottle");
        assert_eq!(torus().f_vector(), vec![7, 21, 14]);
    }

    #[test]
    fn sphere_bundles() {
        let straight = s2_x_s1();
        assert!(is_combinatorial_manifold(&straight).unwrap().is_manifold);
        let p = homology_profile(&straight);
        assert_eq!(p.betti, vec![1, 1, 1, 1]);
        assert!(!p.has_torsion());
        assert!(orientability(&straight).unwrap());

        let twisted = s2_twist_s1();
        assert!(is_combinatorial_manifold(&twisted).unwrap().is_manifold);
        let p = homology_profile(&twisted);
        assert_eq!(p.betti, vec![1, 1, 0, 0]);
        assert_eq!(p.torsion_strings(), vec!["", "", "Z_2", ""]);
        assert!(!orientability(&twisted).unwrap());
    }

    #[test]
    fn moves_preserve_manifolds() {
        let mut rng = KeyedRng::new(5, 0);
        for base in [torus(), rp2(), boundary_4_simplex(), s2_x_s1()] {
            let before = homology_profile(&base);
            let k = randomize(&base, &mut rng, 12, 12);
            assert!(is_combinatorial_manifold(&k).unwrap().is_manifold);
            assert_eq!(homology_profile(&k), before);
        }
    }

    #[test]
    fn random_complexes_are_closed() {
        let mut rng = KeyedRng::new(1, 1);
        for _ in 0..50 {
            let k = random_complex(&mut rng, 7, 3);
            assert!(!k.is_empty());
            assert!(k.dim().unwrap() <= 3);
        }
    }
}
