//! Finite-type hyperbolic surfaces glued from generalized Y-pieces.
//!
//! A [`SurfaceSpec`] is the serialized form; [`Surface`] is a validated spec
//! with its slot table and pieces multigraph precomputed.

mod domain;
mod family;
mod thick_thin;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypmath::HypError;

pub use domain::{domain_from_pieces, GeodesicDomain};
pub use family::{Expr, FamilyError, FamilyInstance, FamilySpec};
pub use thick_thin::{lambda_x, thick_thin, CuspCollar, ThickThin, ThinCollar};

pub const SLOTS_PER_PIECE: usize = 3;

/// `(piece, slot)`, serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SlotRef(pub usize, pub usize);

impl SlotRef {
    pub fn piece(self) -> usize {
        self.0
    }
    pub fn slot(self) -> usize {
        self.1
    }
}

impl fmt::Display for SlotRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gluing {
    pub a: SlotRef,
    pub b: SlotRef,
    /// Full length of the glued closed geodesic.
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub pieces: usize,
    #[serde(default)]
    pub gluings: Vec<Gluing>,
    #[serde(default)]
    pub cusps: Vec<SlotRef>,
    /// Pieces forming the region of interest of a truncated infinite surface.
    /// Domain searches stay inside it; `None` means every piece.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    NoPieces,
    PieceOutOfRange(SlotRef),
    SlotOutOfRange(SlotRef),
    /// A gluing pairs a slot with itself.
    FixedPoint { gluing: usize },
    /// A slot is used by more than one gluing or cusp.
    SlotReused(SlotRef),
    SlotUnassigned(SlotRef),
    BadLength { gluing: usize },
    Disconnected { components: usize },
    WindowEmpty,
    WindowOutOfRange(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPieces => write!(f, "surface has no pieces"),
            Violation::PieceOutOfRange(s) => write!(f, "slot {s} refers to a missing piece"),
            Violation::SlotOutOfRange(s) => write!(f, "slot {s} has slot index >= 3"),
            Violation::FixedPoint { gluing } => {
                write!(f, "gluing {gluing} pairs a slot with itself: matching not an involution")
            }
            Violation::SlotReused(s) => {
                write!(f, "slot {s} assigned more than once: matching not an involution")
            }
            Violation::SlotUnassigned(s) => write!(f, "slot {s} is neither glued nor a cusp"),
            Violation::BadLength { gluing } => {
                write!(f, "gluing {gluing} length must be positive and finite")
            }
            Violation::Disconnected { components } => {
                write!(f, "pieces multigraph has {components} components")
            }
            Violation::WindowEmpty => write!(f, "window is empty"),
            Violation::WindowOutOfRange(p) => write!(f, "window piece {p} does not exist"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid surface spec: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationErrors(pub Vec<Violation>);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),
    #[error("piece set is empty")]
    EmptyPieceSet,
    #[error("piece {0} does not exist")]
    NoSuchPiece(usize),
    #[error("piece set is not connected")]
    Disconnected,
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error(transparent)]
    Hyp(#[from] HypError),
}

/// What occupies a slot of a piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotUse {
    Glued { gluing: usize, other: SlotRef },
    Cusp { cusp: usize },
}

/// Checks every spec invariant and reports all failures.
pub fn validate(spec: &SurfaceSpec) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if spec.pieces == 0 {
        out.push(Violation::NoPieces);
    }
    let mut uses = vec![0usize; spec.pieces * SLOTS_PER_PIECE];
    let mut reused = BTreeSet::new();
    let mut mark = |s: SlotRef, out: &mut Vec<Violation>| {
        if s.piece() >= spec.pieces {
            out.push(Violation::PieceOutOfRange(s));
            return;
        }
        if s.slot() >= SLOTS_PER_PIECE {
            out.push(Violation::SlotOutOfRange(s));
            return;
        }
        let k = s.piece() * SLOTS_PER_PIECE + s.slot();
        uses[k] += 1;
        if uses[k] > 1 {
            reused.insert(s);
        }
    };
    for (i, g) in spec.gluings.iter().enumerate() {
        if g.a == g.b {
            out.push(Violation::FixedPoint { gluing: i });
            mark(g.a, &mut out);
        } else {
            mark(g.a, &mut out);
            mark(g.b, &mut out);
        }
        if !g.length.is_finite() || g.length <= 0.0 {
            out.push(Violation::BadLength { gluing: i });
        }
    }
    for &c in &spec.cusps {
        mark(c, &mut out);
    }
    out.extend(reused.into_iter().map(Violation::SlotReused));
    for p in 0..spec.pieces {
        for s in 0..SLOTS_PER_PIECE {
            if uses[p * SLOTS_PER_PIECE + s] == 0 {
                out.push(Violation::SlotUnassigned(SlotRef(p, s)));
            }
        }
    }
    if spec.pieces > 0 {
        let mut uf = UnionFind::new(spec.pieces);
        for g in &spec.gluings {
            if g.a.piece() < spec.pieces && g.b.piece() < spec.pieces {
                uf.union(g.a.piece(), g.b.piece());
            }
        }
        let components = uf.components();
        if components > 1 {
            out.push(Violation::Disconnected { components });
        }
    }
    if let Some(window) = &spec.window {
        if window.is_empty() {
            out.push(Violation::WindowEmpty);
        }
        for &p in window {
            if p >= spec.pieces {
                out.push(Violation::WindowOutOfRange(p));
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
    fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

/// A validated surface spec.
#[derive(Debug, Clone)]
pub struct Surface {
    spec: SurfaceSpec,
    slots: Vec<[SlotUse; SLOTS_PER_PIECE]>,
    /// `(neighbor piece, gluing id)` per piece; self-loops appear once.
    adjacency: Vec<Vec<(usize, usize)>>,
    separating: Vec<bool>,
    window: Vec<usize>,
}

impl Surface {
    pub fn new(spec: SurfaceSpec) -> Result<Self, ValidationErrors> {
        validate(&spec).map_err(ValidationErrors)?;
        let placeholder = SlotUse::Cusp { cusp: usize::MAX };
        let mut slots = vec![[placeholder; SLOTS_PER_PIECE]; spec.pieces];
        let mut adjacency = vec![Vec::new(); spec.pieces];
        for (i, g) in spec.gluings.iter().enumerate() {
            slots[g.a.piece()][g.a.slot()] = SlotUse::Glued { gluing: i, other: g.b };
            slots[g.b.piece()][g.b.slot()] = SlotUse::Glued { gluing: i, other: g.a };
            adjacency[g.a.piece()].push((g.b.piece(), i));
            if g.a.piece() != g.b.piece() {
                adjacency[g.b.piece()].push((g.a.piece(), i));
            }
        }
        for (i, c) in spec.cusps.iter().enumerate() {
            slots[c.piece()][c.slot()] = SlotUse::Cusp { cusp: i };
        }
        let separating = bridges(spec.pieces, &spec.gluings);
        let window = match &spec.window {
            Some(w) => w.iter().copied().collect::<BTreeSet<_>>().into_iter().collect(),
            None => (0..spec.pieces).collect(),
        };
        Ok(Self {
            spec,
            slots,
            adjacency,
            separating,
            window,
        })
    }

    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    pub fn piece_count(&self) -> usize {
        self.spec.pieces
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.spec.gluings
    }

    pub fn cusps(&self) -> &[SlotRef] {
        &self.spec.cusps
    }

    pub fn slot_use(&self, s: SlotRef) -> SlotUse {
        self.slots[s.piece()][s.slot()]
    }

    pub fn piece_slots(&self, piece: usize) -> &[SlotUse; SLOTS_PER_PIECE] {
        &self.slots[piece]
    }

    pub fn neighbors(&self, piece: usize) -> &[(usize, usize)] {
        &self.adjacency[piece]
    }

    /// Whether removing the geodesic of `gluing` disconnects the surface.
    pub fn is_separating(&self, gluing: usize) -> bool {
        self.separating[gluing]
    }

    /// Sorted window pieces (all pieces when the spec has no window).
    pub fn window(&self) -> &[usize] {
        &self.window
    }

    pub fn has_window(&self) -> bool {
        self.spec.window.is_some()
    }

    pub fn cusps_on_piece(&self, piece: usize) -> usize {
        self.slots[piece]
            .iter()
            .filter(|u| matches!(u, SlotUse::Cusp { .. }))
            .count()
    }
}

/// Bridge flags of the pieces multigraph, one per gluing.
fn bridges(n: usize, gluings: &[Gluing]) -> Vec<bool> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, g) in gluings.iter().enumerate() {
        if g.a.piece() != g.b.piece() {
            adj[g.a.piece()].push((g.b.piece(), i));
            adj[g.b.piece()].push((g.a.piece(), i));
        }
    }
    let mut is_bridge = vec![false; gluings.len()];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (vertex, edge used to enter, next neighbor index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(top) = stack.last_mut() {
            let (v, via) = (top.0, top.1);
            if top.2 < adj[v].len() {
                let (w, e) = adj[v][top.2];
                top.2 += 1;
                if e == via {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, e, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        is_bridge[via] = true;
                    }
                }
            }
        }
    }
    is_bridge
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn thrice_punctured() -> SurfaceSpec {
        SurfaceSpec {
            pieces: 1,
            gluings: vec![],
            cusps: vec![SlotRef(0, 0), SlotRef(0, 1), SlotRef(0, 2)],
            window: None,
        }
    }

    pub(crate) fn genus_two() -> SurfaceSpec {
        SurfaceSpec {
            pieces: 2,
            gluings: (0..3)
                .map(|s| Gluing {
                    a: SlotRef(0, s),
                    b: SlotRef(1, s),
                    length: 1.0 + s as f64,
                })
                .collect(),
            cusps: vec![],
            window: None,
        }
    }

    #[test]
    fn smallest_specs_validate() {
        assert_eq!(validate(&thrice_punctured()), Ok(()));
        assert_eq!(validate(&genus_two()), Ok(()));
        let s = Surface::new(genus_two()).unwrap();
        assert!((0..3).all(|g| !s.is_separating(g)));
    }

    #[test]
    fn slot_glued_twice() {
        let mut spec = genus_two();
        spec.gluings[1].a = SlotRef(0, 0);
        let errs = validate(&spec).unwrap_err();
        assert!(errs.contains(&Violation::SlotReused(SlotRef(0, 0))));
        assert!(errs.contains(&Violation::SlotUnassigned(SlotRef(0, 1))));
        assert!(errs.iter().any(|v| v.to_string().contains("matching not an involution")));
    }

    #[test]
    fn reports_every_violation() {
        let spec = SurfaceSpec {
            pieces: 2,
            gluings: vec![Gluing {
                a: SlotRef(0, 0),
                b: SlotRef(0, 0),
                length: -1.0,
            }],
            cusps: vec![SlotRef(5, 0), SlotRef(1, 7)],
            window: Some(vec![]),
        };
        let errs = validate(&spec).unwrap_err();
        assert!(errs.contains(&Violation::FixedPoint { gluing: 0 }));
        assert!(errs.contains(&Violation::BadLength { gluing: 0 }));
        assert!(errs.contains(&Violation::PieceOutOfRange(SlotRef(5, 0))));
        assert!(errs.contains(&Violation::SlotOutOfRange(SlotRef(1, 7))));
        assert!(errs.contains(&Violation::Disconnected { components: 2 }));
        assert!(errs.contains(&Violation::WindowEmpty));
    }

    #[test]
    fn json_field_names() {
        let text = r#"{"pieces":2,"gluings":[{"a":[0,0],"b":[1,0],"length":0.5}],
            "cusps":[[0,1],[0,2],[1,1],[1,2]]}"#;
        let spec: SurfaceSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.gluings[0].b, SlotRef(1, 0));
        assert!(validate(&spec).is_ok());
        let back = serde_json::to_string(&spec).unwrap();
        assert!(back.contains(r#""a":[0,0]"#));
        assert!(!back.contains("window"));
        let again: SurfaceSpec = serde_json::from_str(&back).unwrap();
        assert_eq!(again, spec);
    }

    fn brute_force_separating(spec: &SurfaceSpec, gluing: usize) -> bool {
        let mut uf = UnionFind::new(spec.pieces);
        for (i, g) in spec.gluings.iter().enumerate() {
            if i != gluing {
                uf.union(g.a.piece(), g.b.piece());
            }
        }
        uf.components() > 1
    }

    #[test]
    fn bridges_match_deletion_check() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let k = rng.gen_range(1..=10);
            let spec = crate::generate::random_spec(&mut rng, k);
            let s = Surface::new(spec.clone()).unwrap();
            for g in 0..spec.gluings.len() {
                assert_eq!(s.is_separating(g), brute_force_separating(&spec, g), "{spec:?}");
            }
        }
    }

    #[test]
    fn self_loop_never_separating() {
        let spec = SurfaceSpec {
            pieces: 1,
            gluings: vec![Gluing {
                a: SlotRef(0, 0),
                b: SlotRef(0, 1),
                length: 0.1,
            }],
            cusps: vec![SlotRef(0, 2)],
            window: None,
        };
        let s = Surface::new(spec).unwrap();
        assert!(!s.is_separating(0));
        assert_eq!(s.neighbors(0), &[(0, 0)]);
    }
}
