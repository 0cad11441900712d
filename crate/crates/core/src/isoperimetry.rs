//! Isoperimetric constants over geodesic domains made of whole pieces.
//!
//! `h_g` is the infimum of `L(∂G) / A(G)` over connected piece sets `G`
//! inside the window; `A(G) = 2π|G|` by Gauss–Bonnet. Regularity compares the
//! length of long boundary components with the count of short ones.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::surface::{domain_from_pieces, GeodesicDomain, SlotUse, Surface, SurfaceError};

/// Windows are enumerated with 128-bit piece masks.
pub const MAX_WINDOW: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    RatioCutHeuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoperimetricReport {
    pub best_ratio: f64,
    pub best_domain: GeodesicDomain,
    pub domains_examined: u64,
    pub method: Method,
    /// True only when every connected domain in the window was examined.
    pub lower_bound_certified: bool,
    /// Domain size cap used by the search.
    pub max_pieces: usize,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub delta: f64,
    /// `+inf` when no examined domain has a short boundary component.
    #[serde(with = "inf_as_null")]
    pub worst_c: f64,
    pub witness_domain: Option<GeodesicDomain>,
    pub domains_examined: u64,
    pub truncated: bool,
}

/// JSON has no infinity; `null` stands for `+inf`.
pub mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Window pieces with 128-bit neighbor masks over window positions.
struct WindowIndex {
    pieces: Vec<usize>,
    /// `(other piece position or None if outside the window, length)` per slot.
    slots: Vec<Vec<(Option<usize>, f64)>>,
    nbr: Vec<u128>,
}

impl WindowIndex {
    fn new(surface: &Surface) -> Result<Self, SurfaceError> {
        let pieces = surface.window().to_vec();
        if pieces.len() > MAX_WINDOW {
            return Err(SurfaceError::Parameter(format!(
                "window has {} pieces; exact enumeration supports at most {MAX_WINDOW}",
                pieces.len()
            )));
        }
        let mut pos = vec![None; surface.piece_count()];
        for (i, &p) in pieces.iter().enumerate() {
            pos[p] = Some(i);
        }
        let mut slots = Vec::with_capacity(pieces.len());
        let mut nbr = vec![0u128; pieces.len()];
        for (i, &p) in pieces.iter().enumerate() {
            let mut list = Vec::new();
            for u in surface.piece_slots(p) {
                if let SlotUse::Glued { gluing, other } = *u {
                    let q = pos[other.piece()];
                    list.push((q, surface.gluings()[gluing].length));
                    if let Some(q) = q {
                        if q != i {
                            nbr[i] |= 1u128 << q;
                        }
                    }
                }
            }
            slots.push(list);
        }
        Ok(Self { pieces, slots, nbr })
    }

    fn len(&self) -> usize {
        self.pieces.len()
    }

    fn members(&self, mask: u128) -> Vec<usize> {
        (0..self.len()).filter(|&i| mask >> i & 1 == 1).map(|i| self.pieces[i]).collect()
    }

    /// Change in boundary totals when piece `i` joins `sub`.
    fn step(&self, sub: u128, i: usize, short_below: f64, t: Tally) -> Tally {
        let mut t = t;
        for &(q, len) in &self.slots[i] {
            let sign = match q {
                Some(q) if q == i => continue,
                Some(q) if sub >> q & 1 == 1 => -1.0,
                _ => 1.0,
            };
            t.length += sign * len;
            if len < short_below {
                t.short += sign as i32;
            } else {
                t.long += sign * len;
            }
        }
        t
    }

    /// Calls `visit` on every connected piece set of at most `cap` pieces
    /// with its boundary totals (components shorter than `short_below` are
    /// counted, the others summed), one accumulator per root, roots in window
    /// order.
    fn enumerate<A: Send>(
        &self,
        cap: usize,
        short_below: f64,
        init: impl Fn() -> A + Sync,
        visit: impl Fn(&mut A, u128, Tally) + Sync,
    ) -> Vec<A> {
        struct Walk<'a, V> {
            w: &'a WindowIndex,
            visit: &'a V,
            above: u128,
            cap: usize,
            short_below: f64,
        }
        fn extend<A, V: Fn(&mut A, u128, Tally)>(
            k: &Walk<'_, V>,
            acc: &mut A,
            sub: u128,
            mut ext: u128,
            closed: u128,
            size: usize,
            tally: Tally,
        ) {
            (k.visit)(acc, sub, tally);
            if size == k.cap {
                return;
            }
            while ext != 0 {
                let i = ext.trailing_zeros() as usize;
                ext &= ext - 1;
                let bit = 1u128 << i;
                let fresh = k.w.nbr[i] & !closed & k.above;
                let t = k.w.step(sub, i, k.short_below, tally);
                extend(k, acc, sub | bit, ext | fresh, closed | k.w.nbr[i] | bit, size + 1, t);
            }
        }
        (0..self.len())
            .into_par_iter()
            .map(|root| {
                let mut acc = init();
                let bit = 1u128 << root;
                let above = if root + 1 >= 128 { 0 } else { !0u128 << (root + 1) };
                let walk = Walk {
                    w: self,
                    visit: &visit,
                    above,
                    cap,
                    short_below,
                };
                let t = self.step(0, root, short_below, Tally::default());
                extend(&walk, &mut acc, bit, self.nbr[root] & above, self.nbr[root] | bit, 1, t);
                acc
            })
            .collect()
    }
}

/// Clears the rounding residue of incremental sums so that equal domains
/// compare equal.
fn snap(x: f64) -> f64 {
    ((x * 1e12).round() / 1e12).max(0.0)
}

/// Running boundary totals of a piece set.
#[derive(Clone, Copy, Default)]
struct Tally {
    length: f64,
    long: f64,
    short: i32,
}

/// Lexicographic order of the sorted member lists of two masks.
fn lex_less(a: u128, b: u128) -> bool {
    if a == b {
        return false;
    }
    let p = (a ^ b).trailing_zeros();
    if a >> p & 1 == 1 {
        b >> p != 0
    } else {
        a >> p == 0
    }
}

#[derive(Clone, Copy)]
struct Best {
    key: f64,
    mask: u128,
}

impl Best {
    const NONE: Best = Best {
        key: f64::INFINITY,
        mask: 0,
    };

    fn offer(&mut self, key: f64, mask: u128) {
        if self.mask == 0 || key < self.key || (key == self.key && lex_less(mask, self.mask)) {
            *self = Best { key, mask };
        }
    }

    fn merge(self, other: Best) -> Best {
        let mut b = self;
        if other.mask != 0 {
            b.offer(other.key, other.mask);
        }
        b
    }
}

fn domain_of(surface: &Surface, w: &WindowIndex, mask: u128) -> GeodesicDomain {
    domain_from_pieces(surface, &w.members(mask)).expect("enumerated piece sets are connected")
}

/// Exhaustive `h_g` over connected window domains of at most `max_pieces` pieces.
pub fn h_g_exact(surface: &Surface, max_pieces: usize) -> Result<IsoperimetricReport, SurfaceError> {
    if max_pieces == 0 {
        return Err(SurfaceError::Parameter("max_pieces must be at least 1".into()));
    }
    let w = WindowIndex::new(surface)?;
    let cap = max_pieces.min(w.len());
    let per_root = w.enumerate(
        cap,
        0.0,
        || (Best::NONE, 0u64),
        |acc, mask, tally| {
            let ratio = snap(tally.length) / (2.0 * PI * mask.count_ones() as f64);
            acc.0.offer(ratio, mask);
            acc.1 += 1;
        },
    );
    let (best, examined) = per_root
        .into_iter()
        .fold((Best::NONE, 0), |(b, n), (x, k)| (b.merge(x), n + k));
    let domain = domain_of(surface, &w, best.mask);
    let truncated = cap < w.len();
    Ok(IsoperimetricReport {
        best_ratio: domain.ratio(),
        best_domain: domain,
        domains_examined: examined,
        method: Method::Exhaustive,
        lower_bound_certified: !truncated,
        max_pieces: cap,
        truncated,
    })
}

/// `inf L(∂_δ G) / CC(∂G ∖ ∂_δ G)` over enumerated domains, `x/0 = +inf`.
pub fn regularity_constant(
    surface: &Surface,
    delta: f64,
    max_pieces: usize,
) -> Result<RegularityReport, SurfaceError> {
    if !(delta > 0.0) {
        return Err(SurfaceError::Parameter(format!("delta must be positive, got {delta}")));
    }
    if max_pieces == 0 {
        return Err(SurfaceError::Parameter("max_pieces must be at least 1".into()));
    }
    let w = WindowIndex::new(surface)?;
    let cap = max_pieces.min(w.len());
    let per_root = w.enumerate(
        cap,
        delta,
        || (Best::NONE, 0u64),
        |acc, mask, tally| {
            acc.1 += 1;
            if tally.short > 0 {
                acc.0.offer(snap(tally.long) / tally.short as f64, mask);
            }
        },
    );
    let (best, examined) = per_root
        .into_iter()
        .fold((Best::NONE, 0), |(b, n), (x, k)| (b.merge(x), n + k));
    let witness = (best.mask != 0).then(|| domain_of(surface, &w, best.mask));
    Ok(RegularityReport {
        delta,
        worst_c: if best.mask == 0 { f64::INFINITY } else { best.key },
        witness_domain: witness,
        domains_examined: examined,
        truncated: cap < w.len(),
    })
}

/// Numerical re-check of the inequality chain leading from a short-boundary
/// witness at scale `1/n` to `A(G) > (nπ/3) L(∂G)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityChain {
    pub n: f64,
    /// `L(∂_{1/n} G)`: boundary components of length at least `1/n`.
    pub long_length: f64,
    /// `CC(∂G ∖ ∂_{1/n} G)`.
    pub short_count: usize,
    pub boundary_length: f64,
    pub area: f64,
    /// `L(∂_{1/n} G) < CC / n`.
    pub hypothesis: bool,
    /// `L(∂G) < (2/n) CC`.
    pub reg1: bool,
    /// `CC <= m <= 3(m + p - 2 + 2g)`.
    pub reg2: bool,
    /// `A(G) > (nπ/3) L(∂G)`.
    pub conclusion: bool,
}

impl RegularityChain {
    /// The chain is consistent when the hypothesis forces every later step.
    pub fn holds(&self) -> bool {
        !self.hypothesis || (self.reg1 && self.reg2 && self.conclusion)
    }
}

pub fn regularity_chain(domain: &GeodesicDomain, n: f64, tol: f64) -> RegularityChain {
    let scale = 1.0 / n;
    let long_length: f64 = domain.boundary_lengths.iter().filter(|&&l| l >= scale).sum();
    let short_count = domain.boundary_lengths.iter().filter(|&&l| l < scale).count();
    let cc = short_count as f64;
    let chi = domain.euler_index();
    RegularityChain {
        n,
        long_length,
        short_count,
        boundary_length: domain.boundary_length,
        area: domain.area,
        hypothesis: long_length < cc / n,
        reg1: domain.boundary_length < 2.0 * cc / n + tol,
        reg2: short_count <= domain.boundary_count && domain.boundary_count as i64 <= 3 * chi,
        conclusion: domain.area > n * PI / 3.0 * domain.boundary_length - tol,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParametricBudget {
    /// Random single-piece starts per Dinkelbach round.
    pub restarts: usize,
    pub max_rounds: usize,
    pub seed: u64,
}

impl Default for ParametricBudget {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_rounds: 50,
            seed: 0,
        }
    }
}

struct LocalSearch<'a> {
    surface: &'a Surface,
    in_window: Vec<bool>,
}

impl LocalSearch<'_> {
    fn boundary_length(&self, set: &[bool]) -> f64 {
        let mut l = 0.0;
        for (p, &inside) in set.iter().enumerate() {
            if !inside {
                continue;
            }
            for u in self.surface.piece_slots(p) {
                if let SlotUse::Glued { gluing, other } = *u {
                    if !set[other.piece()] {
                        l += self.surface.gluings()[gluing].length;
                    }
                }
            }
        }
        l
    }

    fn connected(&self, set: &[bool]) -> bool {
        let Some(start) = set.iter().position(|&b| b) else {
            return false;
        };
        let mut seen = vec![false; set.len()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(p) = stack.pop() {
            for &(q, _) in self.surface.neighbors(p) {
                if set[q] && !seen[q] {
                    seen[q] = true;
                    count += 1;
                    stack.push(q);
                }
            }
        }
        count == set.iter().filter(|&&b| b).count()
    }

    fn objective(&self, set: &[bool], lambda: f64) -> f64 {
        let k = set.iter().filter(|&&b| b).count() as f64;
        self.boundary_length(set) - lambda * 2.0 * PI * k
    }

    /// Steepest descent on `L - λA` with single-piece add/remove moves.
    fn descend(&self, mut set: Vec<bool>, lambda: f64) -> (Vec<bool>, f64) {
        let mut value = self.objective(&set, lambda);
        loop {
            let mut best: Option<(usize, f64)> = None;
            for p in 0..set.len() {
                if !self.in_window[p] {
                    continue;
                }
                let adding = !set[p];
                if adding && !self.surface.neighbors(p).iter().any(|&(q, _)| set[q]) {
                    continue;
                }
                set[p] = adding;
                if adding || self.connected(&set) {
                    let v = self.objective(&set, lambda);
                    if v < value - 1e-12 && best.is_none_or(|b| v < b.1) {
                        best = Some((p, v));
                    }
                }
                set[p] = !adding;
            }
            match best {
                Some((p, v)) => {
                    set[p] = !set[p];
                    value = v;
                }
                None => return (set, value),
            }
        }
    }
}

/// Dinkelbach iteration for `inf L(∂G)/A(G)` with local search on each
/// parametric subproblem. The result is an upper bound only.
pub fn h_g_parametric(surface: &Surface, budget: ParametricBudget) -> Result<IsoperimetricReport, SurfaceError> {
    let n = surface.piece_count();
    let mut in_window = vec![false; n];
    for &p in surface.window() {
        in_window[p] = true;
    }
    let search = LocalSearch { surface, in_window };
    let ratio = |set: &[bool]| {
        let k = set.iter().filter(|&&b| b).count() as f64;
        search.boundary_length(set) / (2.0 * PI * k)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let window = surface.window();
    let single = |p: usize| {
        let mut s = vec![false; n];
        s[p] = true;
        s
    };
    let mut best = single(window[0]);
    for &p in window {
        let s = single(p);
        if ratio(&s) < ratio(&best) {
            best = s;
        }
    }
    if search.connected(&search.in_window) && ratio(&search.in_window) < ratio(&best) {
        best = search.in_window.clone();
    }
    let mut examined = window.len() as u64 + 1;
    for _ in 0..budget.max_rounds {
        let lambda = ratio(&best);
        let mut starts = vec![best.clone()];
        if search.connected(&search.in_window) {
            starts.push(search.in_window.clone());
        }
        for _ in 0..budget.restarts {
            starts.push(single(window[rng.gen_range(0..window.len())]));
        }
        let mut round_best: Option<(Vec<bool>, f64)> = None;
        for s in starts {
            let (set, value) = search.descend(s, lambda);
            examined += 1;
            if round_best.as_ref().is_none_or(|b| value < b.1) {
                round_best = Some((set, value));
            }
        }
        let (set, value) = round_best.expect("at least one start");
        if value < -1e-12 && ratio(&set) < lambda {
            best = set;
        } else {
            break;
        }
    }
    let pieces: Vec<usize> = (0..n).filter(|&p| best[p]).collect();
    let domain = domain_from_pieces(surface, &pieces)?;
    Ok(IsoperimetricReport {
        best_ratio: domain.ratio(),
        max_pieces: window.len(),
        best_domain: domain,
        domains_examined: examined,
        method: Method::RatioCutHeuristic,
        lower_bound_certified: false,
        truncated: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl TrendFit {
    pub fn is_decaying(&self, slope_threshold: f64) -> bool {
        self.slope < -slope_threshold
    }
}

/// Least-squares line through `(ln x, ln y)`; `None` with fewer than two
/// points or non-positive coordinates.
pub fn loglog_fit(points: &[(f64, f64)]) -> Option<TrendFit> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(TrendFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiiVerdict {
    HasLiiEvidence,
    NoLiiEvidence,
}

impl std::fmt::Display for LiiVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LiiVerdict::HasLiiEvidence => "has_LII_evidence",
            LiiVerdict::NoLiiEvidence => "no_LII_evidence",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiiReport {
    pub verdict: LiiVerdict,
    /// Fit over the largest (up to) five parameters.
    pub fit: Option<TrendFit>,
    /// `(parameter, h_g)` as given.
    pub points: Vec<(f64, f64)>,
    /// `h >= h_g / (1 + h_g)` for each point.
    pub cheeger_lower_bounds: Vec<f64>,
}

pub const DECAY_SLOPE: f64 = -0.5;
pub const DECAY_R_SQUARED: f64 = 0.9;

/// Heuristic family verdict from `(parameter, h_g)` pairs: decay like a
/// power law over the five largest parameters means no LII evidence. A zero
/// `h_g` among them counts as decay; fewer than three points count as
/// evidence for LII.
pub fn lii_verdict(points: &[(f64, f64)]) -> LiiReport {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tail = &sorted[sorted.len().saturating_sub(5)..];
    let fit = loglog_fit(tail);
    let decaying = tail.len() >= 3
        && (tail.iter().any(|p| p.1 == 0.0)
            || fit.is_some_and(|f| f.slope < DECAY_SLOPE && f.r_squared > DECAY_R_SQUARED));
    LiiReport {
        verdict: if decaying {
            LiiVerdict::NoLiiEvidence
        } else {
            LiiVerdict::HasLiiEvidence
        },
        fit,
        points: points.to_vec(),
        cheeger_lower_bounds: points.iter().map(|p| p.1 / (1.0 + p.1)).collect(),
    }
}
