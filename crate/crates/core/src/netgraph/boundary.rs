use serde::{Deserialize, Serialize};

use super::{NetError, NetGraph, RingKind, VertexTag};
use crate::graphtools::multi_source_bfs;
use crate::surface::{domain_from_pieces, GeodesicDomain};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundarySets {
    /// Hubs and ring samples of the domain's pieces, `w_i` of its cusps and
    /// `v_j` of thin collars meeting it. Sorted.
    pub s_g: Vec<usize>,
    /// Vertices outside `s_g` with a neighbor inside. Sorted.
    pub boundary: Vec<usize>,
    /// Boundary vertices adjacent to a hub or sample of `s_g`.
    pub near_boundary: Vec<usize>,
    /// Boundary vertices reached only through a `v_j`.
    pub via_thin: Vec<usize>,
    /// Largest distance from a `near_boundary` vertex to a sample of a thick
    /// boundary geodesic of the domain; `None` when `near_boundary` is empty.
    pub max_near_distance: Option<usize>,
}

pub fn boundary_vertex_set(net: &NetGraph, domain: &GeodesicDomain) -> Result<BoundarySets, NetError> {
    let surface = net.surface();
    match domain_from_pieces(surface, &domain.piece_set) {
        Ok(d) if d == *domain => {}
        _ => return Err(NetError::MismatchedSpec),
    }
    let mut inside = vec![false; surface.piece_count()];
    for &p in &domain.piece_set {
        inside[p] = true;
    }
    let n = net.vertex_count();
    let mut in_s = vec![false; n];
    for &p in &domain.piece_set {
        in_s[net.hub(p)] = true;
    }
    for r in net.rings() {
        if r.pieces.iter().any(|&p| inside[p]) {
            for v in r.vertices() {
                in_s[v] = true;
            }
        }
    }
    for (c, slot) in surface.cusps().iter().enumerate() {
        if inside[slot.piece()] {
            in_s[net.cusp_vertex(c)] = true;
        }
    }
    for &(g, v) in net.thin_vertices() {
        let gl = &surface.gluings()[g];
        if inside[gl.a.piece()] || inside[gl.b.piece()] {
            in_s[v] = true;
        }
    }
    let s_g: Vec<usize> = (0..n).filter(|&v| in_s[v]).collect();
    let boundary = net.graph().vertex_boundary(&s_g);

    let (near_boundary, via_thin): (Vec<usize>, Vec<usize>) = boundary.iter().partition(|&&v| {
        net.graph()
            .neighbors(v)
            .iter()
            .any(|&u| in_s[u] && !net.tags()[u].is_special())
    });

    let thick_boundary: Vec<usize> = net
        .rings()
        .iter()
        .filter(|r| match r.kind {
            RingKind::Shared { geodesic } => domain.boundary_geodesics.binary_search(&geodesic).is_ok(),
            _ => false,
        })
        .flat_map(|r| r.vertices())
        .collect();
    let max_near_distance = if near_boundary.is_empty() {
        None
    } else {
        let d = multi_source_bfs(net.graph(), &thick_boundary);
        near_boundary
            .iter()
            .map(|&v| d[v].unwrap_or(usize::MAX))
            .max()
    };
    debug_assert!(via_thin
        .iter()
        .all(|&v| matches!(net.tags()[v], VertexTag::Sample { .. })));
    Ok(BoundarySets {
        s_g,
        boundary,
        near_boundary,
        via_thin,
        max_near_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::flute;
    use super::super::{build_net, NetBuildParams};
    use super::*;
    use crate::hypmath::MargulisParam;
    use crate::surface::{SlotRef, Surface};
    use rand::{Rng, SeedableRng};

    fn params() -> NetBuildParams {
        NetBuildParams::default_for(MargulisParam::default_value())
    }

    /// S_G from tags alone, boundary by scanning every vertex pair.
    fn oracle(net: &NetGraph, domain: &GeodesicDomain) -> (Vec<usize>, Vec<usize>) {
        let s = net.surface();
        let inside = |p: usize| domain.piece_set.contains(&p);
        let owner_side = |p: usize, slot: usize| -> Vec<usize> {
            let r = net.slot_ring(SlotRef(p, slot));
            r.pieces.clone()
        };
        let s_g: Vec<usize> = net
            .tags()
            .iter()
            .enumerate()
            .filter(|(_, t)| match **t {
                VertexTag::Hub { piece } => inside(piece),
                VertexTag::Sample { piece, slot, .. } => owner_side(piece, slot).into_iter().any(inside),
                VertexTag::CuspW { cusp } => inside(s.cusps()[cusp].piece()),
                VertexTag::ThinV { geodesic } => {
                    let g = &s.gluings()[geodesic];
                    inside(g.a.piece()) || inside(g.b.piece())
                }
            })
            .map(|(v, _)| v)
            .collect();
        let boundary = (0..net.vertex_count())
            .filter(|v| !s_g.contains(v))
            .filter(|&v| s_g.iter().any(|&u| net.graph().has_edge(u, v)))
            .collect();
        (s_g, boundary)
    }

    #[test]
    fn whole_surface_has_empty_boundary() {
        let f = flute(5);
        let net = build_net(&f, params()).unwrap();
        let all: Vec<usize> = (0..f.piece_count()).collect();
        let d = domain_from_pieces(&f, &all).unwrap();
        let b = boundary_vertex_set(&net, &d).unwrap();
        assert!(b.boundary.is_empty());
        assert_eq!(b.s_g.len(), net.vertex_count());
        assert_eq!(b.max_near_distance, None);
    }

    #[test]
    fn flute_window_boundary_is_two_hubs() {
        for n in [3, 6, 12] {
            let f = flute(n);
            let net = build_net(&f, params()).unwrap();
            let d = domain_from_pieces(&f, f.window()).unwrap();
            let b = boundary_vertex_set(&net, &d).unwrap();
            assert_eq!(b.boundary, vec![net.hub(0), net.hub(n + 1)]);
            assert_eq!(b.max_near_distance, Some(1));
        }
    }

    #[test]
    fn thin_neighbors_are_condition_b() {
        let mut spec = flute(4).spec().clone();
        spec.gluings[2].length = 0.05;
        let s = Surface::new(spec).unwrap();
        let net = build_net(&s, params()).unwrap();
        // pieces 1..=2 end at the thin gluing between 2 and 3
        let d = domain_from_pieces(&s, &[1, 2]).unwrap();
        let b = boundary_vertex_set(&net, &d).unwrap();
        let far_ring = net.slot_ring(s.gluings()[2].b);
        assert_eq!(b.via_thin, far_ring.vertices().collect::<Vec<_>>());
        assert_eq!(b.near_boundary, vec![net.hub(0)]);
    }

    #[test]
    fn rejects_foreign_domain() {
        let a = flute(3);
        let b = flute(5);
        let net = build_net(&a, params()).unwrap();
        let d = domain_from_pieces(&b, &[1, 2, 3, 4]).unwrap();
        assert_eq!(boundary_vertex_set(&net, &d), Err(NetError::MismatchedSpec));
        let mut d = domain_from_pieces(&a, &[1]).unwrap();
        d.boundary_length += 1.0;
        assert_eq!(boundary_vertex_set(&net, &d), Err(NetError::MismatchedSpec));
    }

    #[test]
    fn matches_brute_force_on_random_specs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let k = rng.gen_range(1..=10);
            let s = Surface::new(crate::generate::random_spec(&mut rng, k)).unwrap();
            let net = build_net(&s, params()).unwrap();
            for p in 0..k {
                let mut pieces = vec![p];
                if let Some(&(q, _)) = s.neighbors(p).first() {
                    pieces.push(q);
                }
                let d = domain_from_pieces(&s, &pieces).unwrap();
                let b = boundary_vertex_set(&net, &d).unwrap();
                let (s_g, boundary) = oracle(&net, &d);
                assert_eq!(b.s_g, s_g);
                assert_eq!(b.boundary, boundary);
                assert_eq!(b.near_boundary.len() + b.via_thin.len(), b.boundary.len());
                assert!(b.max_near_distance.is_none_or(|m| m <= 2));
            }
        }
    }
}
