use super::{build_net, NetBuildParams, NetError, NetGraph, RingKind, VertexTag};
use crate::graphtools::WeightedGraph;
use crate::hypmath;
use crate::surface::{SlotUse, Surface, SLOTS_PER_PIECE};

/// Weighted gadget mesh of the surface with cusp collars removed and thin
/// collars cut out, their two boundary rings identified.
#[derive(Debug, Clone)]
pub struct QuotientMesh {
    pub graph: WeightedGraph,
    /// Hubs and ring samples; sample indices are in mesh resolution.
    pub tags: Vec<VertexTag>,
    /// Image of each net vertex; `None` for `w_i` and `v_j`.
    pub vertex_map: Vec<Option<usize>>,
    pub refinement: usize,
    /// Hub spoke weight per piece.
    pub spoke_weights: Vec<f64>,
}

/// Hub spoke weight: collar width of the piece's shortest glued boundary,
/// clamped to `[delta, 1]`, or 1 if nothing is glued to the piece.
pub fn spoke_weight(surface: &Surface, piece: usize, delta: f64) -> f64 {
    let shortest = surface
        .piece_slots(piece)
        .iter()
        .filter_map(|u| match *u {
            SlotUse::Glued { gluing, .. } => Some(surface.gluings()[gluing].length),
            SlotUse::Cusp { .. } => None,
        })
        .fold(f64::INFINITY, f64::min);
    if shortest.is_finite() {
        hypmath::collar_width(shortest)
            .map(|w| w.clamp(delta, 1.0))
            .unwrap_or(1.0)
    } else {
        1.0
    }
}

pub fn build_quotient_mesh(
    surface: &Surface,
    params: NetBuildParams,
    refinement: usize,
) -> Result<(NetGraph, QuotientMesh), NetError> {
    let net = build_net(surface, params)?;
    let mesh = mesh_from_net(&net, refinement)?;
    Ok((net, mesh))
}

pub fn mesh_from_net(net: &NetGraph, refinement: usize) -> Result<QuotientMesh, NetError> {
    if refinement == 0 {
        return Err(NetError::Parameter("refinement must be positive".into()));
    }
    let r = refinement;
    let surface = net.surface();
    let delta = net.params().delta;
    let mut tags = Vec::new();
    let mut vertex_map = vec![None; net.vertex_count()];
    // mesh ring start per net ring
    let mut ring_start = vec![usize::MAX; net.rings().len()];
    let mut edges = Vec::new();
    // thin rings on the `b` side are merged into the ring of the `a` side,
    // whichever of the two comes first in net order
    let thin_partner = |ri: usize| -> Option<usize> {
        let RingKind::Thin { geodesic, side } = net.rings()[ri].kind else {
            return None;
        };
        net.rings().iter().position(|o| o.kind == RingKind::Thin { geodesic, side: 1 - side })
    };
    for p in 0..surface.piece_count() {
        vertex_map[net.hub(p)] = Some(tags.len());
        tags.push(VertexTag::Hub { piece: p });
        for (ri, ring) in net.rings().iter().enumerate() {
            if ring.owner.piece() != p {
                continue;
            }
            if let Some(q) = thin_partner(ri) {
                if q < ri {
                    ring_start[ri] = ring_start[q];
                    continue;
                }
            }
            let size = ring.size * r;
            let first = tags.len();
            ring_start[ri] = first;
            tags.extend((0..size).map(|index| VertexTag::Sample {
                piece: ring.owner.piece(),
                slot: ring.owner.slot(),
                index,
            }));
            let w = ring.length / size as f64;
            match size {
                1 => {}
                2 => edges.push((first, first + 1, w)),
                _ => edges.extend((0..size).map(|i| (first + i, first + (i + 1) % size, w))),
            }
        }
    }
    for (ri, ring) in net.rings().iter().enumerate() {
        for (i, v) in ring.vertices().enumerate() {
            vertex_map[v] = Some(ring_start[ri] + i * r);
        }
    }
    let spoke_weights: Vec<f64> = (0..surface.piece_count())
        .map(|p| spoke_weight(surface, p, delta))
        .collect();
    let cap = net.params().spoke_cap();
    for p in 0..surface.piece_count() {
        let hub = vertex_map[net.hub(p)].expect("hub image");
        let mut seen = Vec::with_capacity(SLOTS_PER_PIECE);
        for s in 0..SLOTS_PER_PIECE {
            let ring = net.slot_ring(crate::surface::SlotRef(p, s));
            if seen.contains(&ring.first) {
                continue;
            }
            seen.push(ring.first);
            for i in ring.spoke_indices(cap) {
                let target = vertex_map[ring.first + i].expect("sample image");
                edges.push((hub, target, spoke_weights[p]));
            }
        }
    }
    let graph = WeightedGraph::from_edges(tags.len(), &edges)?;
    Ok(QuotientMesh {
        graph,
        tags,
        vertex_map,
        refinement: r,
        spoke_weights,
    })
}
