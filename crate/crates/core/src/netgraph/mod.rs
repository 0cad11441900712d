//! Gadget model of the net graph of the truncated thick part.
//!
//! Each piece contributes a hub vertex and one ring of samples per boundary
//! curve: cusp-collar boundaries (length `2 sinh eps`), boundaries of thin
//! collars around geodesics shorter than `2 delta` (one ring per side), and
//! thick glued geodesics (one ring shared by both sides). A ring of length
//! `L` carries `ceil(L / delta)` samples joined in a cycle. Special vertices
//! `w_i` (one per cusp) and `v_j` (one per delta-thin geodesic) are joined to
//! every sample of their rings.
//!
//! The hub stands in for the interior of the piece. It is joined to every
//! sample of rings with at most `n_c = ceil(2 sinh eps / delta)` samples and
//! to `n_c` evenly spaced samples of longer rings, which keeps degrees bounded
//! independently of the gluing lengths.

mod boundary;
mod mesh;
mod qi;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphtools::{write_edge_list, Graph, GraphError};
use crate::hypmath::{self, HypError, MargulisParam};
use crate::surface::{SlotRef, SlotUse, Surface, SurfaceError, SLOTS_PER_PIECE};

pub use boundary::{boundary_vertex_set, BoundarySets};
pub use mesh::{build_quotient_mesh, mesh_from_net, spoke_weight, QuotientMesh};
pub use qi::{estimate_qi_constants, net_vs_mesh_qi, quantize, QiEstimate, ALPHA_GRID_MAX, GRID_STEP};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("domain does not belong to this surface")]
    MismatchedSpec,
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Hyp(#[from] HypError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Largest number of net neighbors of a ring sample: two ring neighbors and
/// the hubs of the (at most two) pieces the ring bounds.
pub const SAMPLE_NET_DEGREE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetBuildParams {
    pub eps: MargulisParam,
    pub delta: f64,
    /// Sampling density multiplier; a ring of length `L` gets
    /// `ceil(L * density / delta)` samples.
    pub samples_per_unit_length: u32,
}

impl NetBuildParams {
    pub fn new(eps: MargulisParam, delta: f64) -> Result<Self, NetError> {
        let limit = hypmath::delta1(eps);
        if !(delta > 0.0 && delta < limit) {
            return Err(NetError::Parameter(format!(
                "delta must lie in (0, delta1 = {limit}), got {delta}"
            )));
        }
        Ok(Self {
            eps,
            delta,
            samples_per_unit_length: 1,
        })
    }

    /// `delta = 0.9 delta1(eps)`.
    pub fn default_for(eps: MargulisParam) -> Self {
        Self::new(eps, 0.9 * hypmath::delta1(eps)).expect("0.9 delta1 is admissible")
    }

    pub fn with_density(mut self, density: u32) -> Result<Self, NetError> {
        if density == 0 {
            return Err(NetError::Parameter("sampling density must be positive".into()));
        }
        self.samples_per_unit_length = density;
        Ok(self)
    }

    pub fn ring_size(&self, length: f64) -> usize {
        let x = length * self.samples_per_unit_length as f64 / self.delta;
        ((x - 1e-9).ceil() as usize).max(1)
    }

    /// `n_c`, the sample count of a cusp ring; also the hub spoke cap per ring.
    pub fn spoke_cap(&self) -> usize {
        self.ring_size(2.0 * self.eps.sinh())
    }

    /// Gadget packing constant: a ring sample has two ring neighbors and at
    /// most two hubs.
    pub fn packing_constant(&self) -> usize {
        SAMPLE_NET_DEGREE
    }

    /// `max(mu + 1 + 3 n_c, n_c mu, ceil(4 sinh eps / delta) mu)` with the
    /// sampling density folded into both ceilings.
    ///
    /// The first term covers samples (net neighbors plus one special) and
    /// hubs (at most `n_c` spokes per slot), the others `w_i` and `v_j`.
    pub fn degree_bound(&self) -> usize {
        let mu = self.packing_constant();
        let nc = self.spoke_cap();
        let thin = self.ring_size(4.0 * self.eps.sinh());
        (mu + 1 + 3 * nc).max(nc * mu).max(thin * mu)
    }
}

/// Degree bound for unit sampling density.
pub fn degree_bound(eps: MargulisParam, delta: f64) -> Result<usize, NetError> {
    Ok(NetBuildParams::new(eps, delta)?.degree_bound())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VertexTag {
    Hub { piece: usize },
    /// Sample `index` of the ring owned by `(piece, slot)`.
    Sample { piece: usize, slot: usize, index: usize },
    CuspW { cusp: usize },
    ThinV { geodesic: usize },
}

impl VertexTag {
    pub fn is_special(self) -> bool {
        matches!(self, VertexTag::CuspW { .. } | VertexTag::ThinV { .. })
    }
}

impl fmt::Display for VertexTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VertexTag::Hub { piece } => write!(f, "hub {piece}"),
            VertexTag::Sample { piece, slot, index } => write!(f, "sample {piece} {slot} {index}"),
            VertexTag::CuspW { cusp } => write!(f, "cusp_w {cusp}"),
            VertexTag::ThinV { geodesic } => write!(f, "thin_v {geodesic}"),
        }
    }
}

impl FromStr for VertexTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fields: Vec<&str> = s.split_whitespace().collect();
        let num = |i: usize| -> Result<usize, String> {
            fields
                .get(i)
                .ok_or_else(|| format!("tag `{s}` is too short"))?
                .parse()
                .map_err(|e| format!("tag `{s}`: {e}"))
        };
        let tag = match fields.first().copied() {
            Some("hub") if fields.len() == 2 => VertexTag::Hub { piece: num(1)? },
            Some("sample") if fields.len() == 4 => VertexTag::Sample {
                piece: num(1)?,
                slot: num(2)?,
                index: num(3)?,
            },
            Some("cusp_w") if fields.len() == 2 => VertexTag::CuspW { cusp: num(1)? },
            Some("thin_v") if fields.len() == 2 => VertexTag::ThinV { geodesic: num(1)? },
            _ => return Err(format!("unknown vertex tag `{s}`")),
        };
        Ok(tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RingKind {
    Cusp { cusp: usize },
    /// Boundary of the thin collar on side `side` (0 for `a`, 1 for `b`).
    Thin { geodesic: usize, side: usize },
    /// A thick glued geodesic, shared by both sides.
    Shared { geodesic: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub kind: RingKind,
    pub owner: SlotRef,
    /// Pieces the ring bounds (one or two), ascending.
    pub pieces: Vec<usize>,
    pub length: f64,
    pub first: usize,
    pub size: usize,
}

impl Ring {
    pub fn vertices(&self) -> std::ops::Range<usize> {
        self.first..self.first + self.size
    }

    /// Sample indices joined to a hub.
    pub fn spoke_indices(&self, cap: usize) -> Vec<usize> {
        if self.size <= cap {
            (0..self.size).collect()
        } else {
            (0..cap).map(|k| k * self.size / cap).collect()
        }
    }
}

#[derive(Debug, Clone)]
pub struct NetGraph {
    surface: Surface,
    params: NetBuildParams,
    tags: Vec<VertexTag>,
    graph: Graph,
    rings: Vec<Ring>,
    hubs: Vec<usize>,
    /// Ring index per `(piece, slot)`.
    slot_rings: Vec<[usize; SLOTS_PER_PIECE]>,
    cusp_w: Vec<usize>,
    /// `(geodesic id, vertex)` for each delta-thin geodesic, by geodesic id.
    thin_v: Vec<(usize, usize)>,
}

pub fn build_net(surface: &Surface, params: NetBuildParams) -> Result<NetGraph, NetError> {
    let params = NetBuildParams::new(params.eps, params.delta)?.with_density(params.samples_per_unit_length)?;
    let delta = params.delta;
    let lambda = hypmath::cusp_collar(params.eps).boundary_length;
    let is_thin = |g: usize| surface.gluings()[g].length < 2.0 * delta;
    let mut tags = Vec::new();
    let mut rings: Vec<Ring> = Vec::new();
    let mut hubs = Vec::with_capacity(surface.piece_count());
    let mut owned = vec![[usize::MAX; SLOTS_PER_PIECE]; surface.piece_count()];
    for p in 0..surface.piece_count() {
        hubs.push(tags.len());
        tags.push(VertexTag::Hub { piece: p });
        for s in 0..SLOTS_PER_PIECE {
            let here = SlotRef(p, s);
            let (kind, length, pieces) = match surface.slot_use(here) {
                SlotUse::Cusp { cusp } => (RingKind::Cusp { cusp }, lambda, vec![p]),
                SlotUse::Glued { gluing, other } => {
                    let len = surface.gluings()[gluing].length;
                    if is_thin(gluing) {
                        let side = usize::from(surface.gluings()[gluing].a != here);
                        let bl = hypmath::thin_boundary_length(len, params.eps)?;
                        (RingKind::Thin { geodesic: gluing, side }, bl, vec![p])
                    } else if here < other {
                        let mut pieces = vec![p, other.piece()];
                        pieces.dedup();
                        (RingKind::Shared { geodesic: gluing }, len, pieces)
                    } else {
                        continue;
                    }
                }
            };
            let size = params.ring_size(length);
            let first = tags.len();
            for index in 0..size {
                tags.push(VertexTag::Sample { piece: p, slot: s, index });
            }
            owned[p][s] = rings.len();
            rings.push(Ring {
                kind,
                owner: here,
                pieces,
                length,
                first,
                size,
            });
        }
    }
    let mut slot_rings = owned.clone();
    for p in 0..surface.piece_count() {
        for s in 0..SLOTS_PER_PIECE {
            if slot_rings[p][s] == usize::MAX {
                let SlotUse::Glued { other, .. } = surface.slot_use(SlotRef(p, s)) else {
                    unreachable!("cusp slots own their ring");
                };
                slot_rings[p][s] = owned[other.piece()][other.slot()];
            }
        }
    }
    let cusp_w: Vec<usize> = (0..surface.cusps().len())
        .map(|c| {
            tags.push(VertexTag::CuspW { cusp: c });
            tags.len() - 1
        })
        .collect();
    let thin_v: Vec<(usize, usize)> = (0..surface.gluings().len())
        .filter(|&g| is_thin(g))
        .map(|g| {
            tags.push(VertexTag::ThinV { geodesic: g });
            (g, tags.len() - 1)
        })
        .collect();

    let mut edges = Vec::new();
    for r in &rings {
        match r.size {
            0 | 1 => {}
            2 => edges.push((r.first, r.first + 1)),
            s => edges.extend((0..s).map(|i| (r.first + i, r.first + (i + 1) % s))),
        }
    }
    let cap = params.spoke_cap();
    for p in 0..surface.piece_count() {
        let mut seen = Vec::new();
        for &ri in &slot_rings[p] {
            if seen.contains(&ri) {
                continue;
            }
            seen.push(ri);
            let r = &rings[ri];
            edges.extend(r.spoke_indices(cap).into_iter().map(|i| (hubs[p], r.first + i)));
        }
    }
    for r in &rings {
        let special = match r.kind {
            RingKind::Cusp { cusp } => cusp_w[cusp],
            RingKind::Thin { geodesic, .. } => {
                thin_v[thin_v.binary_search_by_key(&geodesic, |t| t.0).expect("thin geodesic")].1
            }
            RingKind::Shared { .. } => continue,
        };
        edges.extend(r.vertices().map(|v| (special, v)));
    }
    let graph = Graph::from_edges(tags.len(), &edges)?;
    let net = NetGraph {
        surface: surface.clone(),
        params,
        tags,
        graph,
        rings,
        hubs,
        slot_rings,
        cusp_w,
        thin_v,
    };
    if let Err(e) = net.check_structure() {
        panic!("net graph invariant violated: {e}");
    }
    Ok(net)
}

impl NetGraph {
    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    pub fn params(&self) -> NetBuildParams {
        self.params
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn tags(&self) -> &[VertexTag] {
        &self.tags
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn hub(&self, piece: usize) -> usize {
        self.hubs[piece]
    }

    pub fn slot_ring(&self, s: SlotRef) -> &Ring {
        &self.rings[self.slot_rings[s.piece()][s.slot()]]
    }

    pub fn cusp_vertex(&self, cusp: usize) -> usize {
        self.cusp_w[cusp]
    }

    pub fn thin_vertices(&self) -> &[(usize, usize)] {
        &self.thin_v
    }

    pub fn vertex_count(&self) -> usize {
        self.tags.len()
    }

    pub fn max_degree(&self) -> usize {
        self.graph.max_degree()
    }

    pub fn special_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.cusp_w.iter().copied().chain(self.thin_v.iter().map(|t| t.1))
    }

    /// Ring containing sample vertex `v`.
    pub fn ring_of(&self, v: usize) -> Option<&Ring> {
        if !matches!(self.tags.get(v), Some(VertexTag::Sample { .. })) {
            return None;
        }
        let i = self.rings.partition_point(|r| r.first <= v) - 1;
        Some(&self.rings[i])
    }

    /// Special vertices are pairwise non-adjacent with disjoint
    /// neighborhoods, degrees respect the bound, and the graph is connected.
    pub fn check_structure(&self) -> Result<(), String> {
        let mut owner = vec![usize::MAX; self.vertex_count()];
        for s in self.special_vertices() {
            for &u in self.graph.neighbors(s) {
                if self.tags[u].is_special() {
                    return Err(format!("special vertices {s} and {u} are adjacent"));
                }
                if owner[u] != usize::MAX {
                    return Err(format!("vertex {u} neighbors specials {} and {s}", owner[u]));
                }
                owner[u] = s;
            }
        }
        let bound = self.params.degree_bound();
        if self.max_degree() > bound {
            return Err(format!("max degree {} exceeds bound {bound}", self.max_degree()));
        }
        if !self.graph.is_connected() {
            return Err("net graph is disconnected".into());
        }
        Ok(())
    }

    /// `S_G` of the window domain, the interior for ambient Cheeger runs.
    pub fn window_interior(&self) -> Result<Vec<usize>, NetError> {
        let domain = crate::surface::domain_from_pieces(&self.surface, self.surface.window())?;
        Ok(boundary_vertex_set(self, &domain)?.s_g)
    }

    pub fn to_edge_list(&self) -> String {
        let tags: Vec<String> = self.tags.iter().map(ToString::to_string).collect();
        write_edge_list(
            self.vertex_count(),
            self.graph.edges().map(|(u, v)| (u, v, None)),
            Some(&tags),
        )
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph net {\n");
        for (v, t) in self.tags.iter().enumerate() {
            let shape = match t {
                VertexTag::Hub { .. } => "box",
                VertexTag::Sample { .. } => "point",
                VertexTag::CuspW { .. } => "triangle",
                VertexTag::ThinV { .. } => "diamond",
            };
            out.push_str(&format!("  {v} [label=\"{t}\", shape={shape}];\n"));
        }
        for (u, v) in self.graph.edges() {
            out.push_str(&format!("  {u} -- {v};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Reads tags back from an exported edge list.
pub fn parse_tags(list: &crate::graphtools::EdgeList) -> Result<Vec<VertexTag>, NetError> {
    list.tags
        .iter()
        .enumerate()
        .map(|(v, t)| {
            t.as_deref()
                .ok_or_else(|| NetError::Parameter(format!("vertex {v} has no tag")))?
                .parse()
                .map_err(NetError::Parameter)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphtools::{all_pairs_hops, parse_edge_list};
    use crate::surface::tests::thrice_punctured;
    use crate::surface::{Gluing, SurfaceSpec};
    use rand::SeedableRng;

    pub(crate) fn flute(n: usize) -> Surface {
        let mut gluings = Vec::new();
        for i in 0..=n {
            gluings.push(Gluing { a: SlotRef(i, 1), b: SlotRef(i + 1, 0), length: 1.0 });
        }
        let mut cusps = vec![SlotRef(0, 0), SlotRef(0, 2), SlotRef(n + 1, 1), SlotRef(n + 1, 2)];
        cusps.extend((1..=n).map(|i| SlotRef(i, 2)));
        Surface::new(SurfaceSpec { pieces: n + 2, gluings, cusps, window: Some((1..=n).collect()) }).unwrap()
    }

    fn params() -> NetBuildParams {
        NetBuildParams::default_for(MargulisParam::default_value())
    }

    #[test]
    fn parameters() {
        let eps = MargulisParam::default_value();
        assert!(NetBuildParams::new(eps, hypmath::delta1(eps)).is_err());
        assert!(NetBuildParams::new(eps, 0.0).is_err());
        let p = params();
        // 2 sinh eps = 0.9101797..., delta = 0.1762254...
        assert_eq!(p.spoke_cap(), 6);
        assert_eq!(p.degree_bound(), 44);
        assert_eq!(p.ring_size(1.0), 6);
        assert_eq!(p.ring_size(1e-9), 1);
        let eps = MargulisParam::new(0.5).unwrap();
        // n_c = ceil(10.42) = 11, ceil(4 sinh 0.5 / 0.1) = ceil(20.84) = 21
        assert_eq!(degree_bound(eps, 0.1).unwrap(), 84);
    }

    #[test]
    fn degree_bound_grows_as_delta_shrinks() {
        let eps = MargulisParam::new(0.5).unwrap();
        let mut prev = 0;
        for k in 1..=20 {
            let delta = 0.2 / k as f64;
            let b = degree_bound(eps, delta).unwrap();
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn thrice_punctured_sphere() {
        let s = Surface::new(thrice_punctured()).unwrap();
        let net = build_net(&s, params()).unwrap();
        // hub + 3 rings of 6 + 3 w
        assert_eq!(net.vertex_count(), 1 + 18 + 3);
        assert_eq!(net.special_vertices().count(), 3);
        assert!(net.graph().is_connected());
        assert_eq!(net.graph().degree(net.hub(0)), 18);
        assert_eq!(net.graph().degree(net.cusp_vertex(0)), 6);
    }

    #[test]
    fn flute_has_no_thin_vertices() {
        let mut sizes = Vec::new();
        for n in [4, 8, 16] {
            let net = build_net(&flute(n), params()).unwrap();
            assert!(net.thin_vertices().is_empty());
            assert_eq!(net.special_vertices().count(), n + 4);
            sizes.push(net.vertex_count());
        }
        assert_eq!(sizes[2] - sizes[1], 2 * (sizes[1] - sizes[0]));
    }

    #[test]
    fn short_gluing_gets_a_thin_vertex() {
        let mut spec = flute(4).spec().clone();
        spec.gluings[2].length = 0.05;
        let s = Surface::new(spec).unwrap();
        let net = build_net(&s, params()).unwrap();
        assert_eq!(net.thin_vertices().len(), 1);
        let (g, v) = net.thin_vertices()[0];
        assert_eq!(g, 2);
        let nbrs = net.graph().neighbors(v).to_vec();
        let a = net.slot_ring(s.gluings()[2].a);
        let b = net.slot_ring(s.gluings()[2].b);
        let mut expected: Vec<usize> = a.vertices().chain(b.vertices()).collect();
        expected.sort_unstable();
        assert_eq!(nbrs, expected);
        for c in 0..s.cusps().len() {
            let w = net.cusp_vertex(c);
            assert!(net.graph().neighbors(w).iter().all(|u| !nbrs.contains(u)));
        }
    }

    #[test]
    fn random_specs_satisfy_structure() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            use rand::Rng;
            let k = rng.gen_range(1..=10);
            let s = Surface::new(crate::generate::random_spec(&mut rng, k)).unwrap();
            let net = build_net(&s, params()).unwrap();
            net.check_structure().unwrap();
            assert!(net.max_degree() <= params().degree_bound());
            let again = build_net(&s, params()).unwrap();
            assert_eq!(net.to_edge_list(), again.to_edge_list());
            for r in net.rings() {
                if let RingKind::Thin { .. } = r.kind {
                    let specials: Vec<_> = r
                        .vertices()
                        .flat_map(|v| net.graph().neighbors(v).iter().copied())
                        .filter(|&u| matches!(net.tags()[u], VertexTag::CuspW { .. }))
                        .collect();
                    assert!(specials.is_empty());
                }
            }
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let net = build_net(&flute(3), params()).unwrap();
        let text = net.to_edge_list();
        let parsed = parse_edge_list(&text).unwrap();
        assert_eq!(parsed.to_graph().unwrap(), *net.graph());
        assert_eq!(parse_tags(&parsed).unwrap(), net.tags());
        assert!(net.to_dot().starts_with("graph net {"));
        for t in net.tags() {
            assert_eq!(t.to_string().parse::<VertexTag>().unwrap(), *t);
        }
        assert!("hub".parse::<VertexTag>().is_err());
        let _ = all_pairs_hops(net.graph());
    }

    #[test]
    fn ring_lookup() {
        let net = build_net(&flute(2), params()).unwrap();
        for (v, t) in net.tags().iter().enumerate() {
            match (t, net.ring_of(v)) {
                (VertexTag::Sample { piece, slot, index }, Some(r)) => {
                    assert_eq!(r.owner, SlotRef(*piece, *slot));
                    assert_eq!(r.first + index, v);
                }
                (VertexTag::Sample { .. }, None) => panic!("sample without ring"),
                (_, r) => assert!(r.is_none()),
            }
        }
    }
}
