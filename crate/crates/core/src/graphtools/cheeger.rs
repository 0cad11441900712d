//! Vertex-boundary Cheeger constant `min |∂A| / |A|`.
//!
//! Small search spaces are enumerated completely (every subset, connected or
//! not). Larger ones combine a budgeted search over connected subsets with a
//! sweep along a spectral ordering; the result is then only an upper bound.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};

/// Largest search space enumerated subset by subset.
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Total connected subsets visited by the heuristic search.
const SEARCH_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheegerMode {
    /// `A` ranges over subsets of a marked interior; boundaries are taken in
    /// the whole graph.
    Ambient { interior: Vec<usize> },
    /// `A` ranges over subsets with `|A| <= |V| / 2`.
    FiniteHalf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheegerModeKind {
    Ambient,
    FiniteHalf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheegerMethod {
    Exhaustive,
    ConnectedSearch,
    SpectralSweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheegerReport {
    pub value: f64,
    pub boundary_size: usize,
    /// Sorted.
    pub witness_set: Vec<usize>,
    pub mode: CheegerModeKind,
    /// True when every admissible subset was examined.
    pub exact: bool,
    /// Which search produced the witness.
    pub method: CheegerMethod,
    pub subsets_examined: u64,
}

#[derive(Debug, Clone)]
struct Candidate {
    boundary: usize,
    set: Vec<usize>,
}

impl Candidate {
    /// Smaller ratio first, then the lexicographically smaller set.
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.boundary as u128 * other.set.len() as u128;
        let r = other.boundary as u128 * self.set.len() as u128;
        l.cmp(&r).then_with(|| self.set.cmp(&other.set))
    }
}

fn better(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.cmp(&a) == Ordering::Less { b } else { a }),
        (a, b) => a.or(b),
    }
}

pub fn cheeger(graph: &Graph, mode: &CheegerMode, max_size: usize) -> Result<CheegerReport, GraphError> {
    let n = graph.vertex_count();
    if !graph.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let (space, limit, kind) = match mode {
        CheegerMode::Ambient { interior } => {
            let mut u = interior.clone();
            u.sort_unstable();
            u.dedup();
            if let Some(&v) = u.iter().find(|&&v| v >= n) {
                return Err(GraphError::VertexOutOfRange(v));
            }
            let len = u.len();
            (u, len, CheegerModeKind::Ambient)
        }
        CheegerMode::FiniteHalf => ((0..n).collect::<Vec<_>>(), n / 2, CheegerModeKind::FiniteHalf),
    };
    let cap = max_size.min(limit);
    if cap == 0 {
        return Err(GraphError::Parameter(
            "no admissible subsets: empty interior, a single vertex, or max_size 0".into(),
        ));
    }
    let closure_len = {
        let mut c = space.clone();
        c.extend(graph.vertex_boundary(&space));
        c.len()
    };
    let report = |c: Candidate, exact, method, examined| CheegerReport {
        value: c.boundary as f64 / c.set.len() as f64,
        boundary_size: c.boundary,
        witness_set: c.set,
        mode: kind,
        exact,
        method,
        subsets_examined: examined,
    };
    if space.len() <= EXHAUSTIVE_LIMIT && closure_len <= 128 {
        let (best, examined) = exhaustive(graph, &space, cap);
        return Ok(report(best, cap == limit, CheegerMethod::Exhaustive, examined));
    }
    let (searched, examined) = connected_search(graph, &space, cap);
    let swept = sweep(graph, &space, limit, kind);
    let from_search = better(searched.clone(), swept.clone());
    let best = from_search.expect("non-empty search space");
    let method = match &searched {
        Some(s) if s.set == best.set => CheegerMethod::ConnectedSearch,
        _ => CheegerMethod::SpectralSweep,
    };
    Ok(report(best, false, method, examined + 2 * limit as u64))
}

/// Every subset of `space` with at most `cap` elements.
fn exhaustive(graph: &Graph, space: &[usize], cap: usize) -> (Candidate, u64) {
    let mut closure: Vec<usize> = space.to_vec();
    closure.extend(graph.vertex_boundary(space));
    closure.sort_unstable();
    let pos = |v: usize| closure.binary_search(&v).expect("closure covers neighbors");
    let own: Vec<u128> = space.iter().map(|&v| 1u128 << pos(v)).collect();
    let nbr: Vec<u128> = space
        .iter()
        .map(|&v| graph.neighbors(v).iter().fold(0u128, |m, &w| m | 1u128 << pos(w)))
        .collect();
    let k = space.len();
    let lex_less = |a: u32, b: u32| {
        // lowest differing bit decides; a set that ends first is smaller
        let p = (a ^ b).trailing_zeros();
        if a >> p & 1 == 1 {
            b >> p != 0
        } else {
            a >> p == 0
        }
    };
    let pick = |x: (usize, usize, u32), y: (usize, usize, u32)| {
        let l = x.0 * y.1;
        let r = y.0 * x.1;
        match l.cmp(&r) {
            Ordering::Less => x,
            Ordering::Greater => y,
            Ordering::Equal => {
                if x.2 == y.2 || lex_less(x.2, y.2) {
                    x
                } else {
                    y
                }
            }
        }
    };
    let (b, _, mask) = (1u32..(1u32 << k))
        .into_par_iter()
        .filter(|m| m.count_ones() as usize <= cap)
        .map(|m| {
            let (mut inside, mut around) = (0u128, 0u128);
            let mut bits = m;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                inside |= own[i];
                around |= nbr[i];
                bits &= bits - 1;
            }
            ((around & !inside).count_ones() as usize, m.count_ones() as usize, m)
        })
        .reduce(|| (usize::MAX, 1, 0), |x, y| {
            if x.2 == 0 {
                y
            } else if y.2 == 0 {
                x
            } else {
                pick(x, y)
            }
        });
    let set = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| space[i]).collect();
    let examined = (1..=cap).map(|s| binomial(k, s)).sum();
    (Candidate { boundary: b, set }, examined)
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

struct Search<'a> {
    graph: &'a Graph,
    allowed: &'a [bool],
    cap: usize,
    in_sub: Vec<bool>,
    /// Number of subset vertices adjacent to each vertex.
    touch: Vec<u32>,
    boundary: usize,
    sub: Vec<usize>,
    budget: usize,
    visited: u64,
    best: Option<Candidate>,
}

impl Search<'_> {
    fn add(&mut self, w: usize) {
        if self.touch[w] > 0 {
            self.boundary -= 1;
        }
        self.in_sub[w] = true;
        self.sub.push(w);
        for &x in self.graph.neighbors(w) {
            self.touch[x] += 1;
            if !self.in_sub[x] && self.touch[x] == 1 {
                self.boundary += 1;
            }
        }
    }

    fn remove(&mut self, w: usize) {
        for &x in self.graph.neighbors(w) {
            self.touch[x] -= 1;
            if !self.in_sub[x] && self.touch[x] == 0 {
                self.boundary -= 1;
            }
        }
        self.sub.pop();
        self.in_sub[w] = false;
        if self.touch[w] > 0 {
            self.boundary += 1;
        }
    }

    fn record(&mut self) {
        self.visited += 1;
        let mut set = self.sub.clone();
        set.sort_unstable();
        let c = Candidate {
            boundary: self.boundary,
            set,
        };
        self.best = better(self.best.take(), Some(c));
    }

    /// ESU extension step: each connected subset whose least vertex is
    /// `root` is visited exactly once.
    fn extend(&mut self, mut ext: Vec<usize>, root: usize) {
        self.record();
        if self.sub.len() == self.cap {
            return;
        }
        while let Some(w) = ext.pop() {
            if self.visited as usize >= self.budget {
                return;
            }
            let mut next = ext.clone();
            for &u in self.graph.neighbors(w) {
                if u > root && self.allowed[u] && !self.in_sub[u] && self.touch[u] == 0 && !next.contains(&u)
                {
                    next.push(u);
                }
            }
            self.add(w);
            self.extend(next, root);
            self.remove(w);
        }
    }
}

fn connected_search(graph: &Graph, space: &[usize], cap: usize) -> (Option<Candidate>, u64) {
    let n = graph.vertex_count();
    let mut allowed = vec![false; n];
    for &v in space {
        allowed[v] = true;
    }
    let per_root = (SEARCH_BUDGET / space.len().max(1)).max(64);
    let results: Vec<(Option<Candidate>, u64)> = space
        .par_iter()
        .map(|&root| {
            let mut s = Search {
                graph,
                allowed: &allowed,
                cap,
                in_sub: vec![false; n],
                touch: vec![0; n],
                boundary: 0,
                sub: Vec::new(),
                budget: per_root,
                visited: 0,
                best: None,
            };
            s.add(root);
            let ext: Vec<usize> = graph
                .neighbors(root)
                .iter()
                .copied()
                .filter(|&u| u > root && allowed[u])
                .collect();
            s.extend(ext, root);
            (s.best, s.visited)
        })
        .collect();
    results
        .into_iter()
        .fold((None, 0), |(b, c), (x, k)| (better(b, x), c + k))
}

/// Eigenvector for the smallest eigenvalue of the Dirichlet Laplacian on the
/// interior (ambient) or the Fiedler vector (finite half), by inverse
/// iteration with conjugate gradients.
fn spectral_order(graph: &Graph, space: &[usize], kind: CheegerModeKind) -> Vec<f64> {
    let n = graph.vertex_count();
    let k = space.len();
    let mut local = vec![usize::MAX; n];
    for (i, &v) in space.iter().enumerate() {
        local[v] = i;
    }
    let project = kind == CheegerModeKind::FiniteHalf;
    let apply = |x: &[f64], y: &mut [f64]| {
        for (i, &v) in space.iter().enumerate() {
            let mut acc = graph.degree(v) as f64 * x[i];
            for &w in graph.neighbors(v) {
                if local[w] != usize::MAX {
                    acc -= x[local[w]];
                }
            }
            // tiny shift keeps the ambient operator definite on closed components
            y[i] = acc + 1e-9 * x[i];
        }
    };
    let center = |x: &mut [f64]| {
        if project {
            let mean = x.iter().sum::<f64>() / x.len() as f64;
            x.iter_mut().for_each(|v| *v -= mean);
        }
    };
    let normalize = |x: &mut [f64]| {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            x.iter_mut().for_each(|v| *v /= norm);
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    center(&mut x);
    normalize(&mut x);
    let mut y = vec![0.0; k];
    for _ in 0..30 {
        conjugate_gradient(&apply, &x, &mut y, project);
        center(&mut y);
        normalize(&mut y);
        std::mem::swap(&mut x, &mut y);
    }
    x
}

fn conjugate_gradient(apply: &impl Fn(&[f64], &mut [f64]), b: &[f64], x: &mut [f64], project: bool) {
    let k = b.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    x.iter_mut().for_each(|v| *v = 0.0);
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; k];
    let mut rr = dot(&r, &r);
    let tol = 1e-20 * rr.max(1e-300);
    for _ in 0..(2 * k + 100) {
        if rr <= tol {
            break;
        }
        apply(&p, &mut ap);
        if project {
            let mean = ap.iter().sum::<f64>() / k as f64;
            ap.iter_mut().for_each(|v| *v -= mean);
        }
        let alpha = rr / dot(&p, &ap);
        if !alpha.is_finite() {
            break;
        }
        for i in 0..k {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let next = dot(&r, &r);
        let beta = next / rr;
        rr = next;
        for i in 0..k {
            p[i] = r[i] + beta * p[i];
        }
    }
}

/// Best prefix of the spectral ordering, sweeping from both ends.
fn sweep(graph: &Graph, space: &[usize], limit: usize, kind: CheegerModeKind) -> Option<Candidate> {
    let vector = spectral_order(graph, space, kind);
    let mut order: Vec<usize> = (0..space.len()).collect();
    order.sort_by(|&a, &b| vector[a].total_cmp(&vector[b]).then(a.cmp(&b)));
    let mut best = None;
    for reversed in [false, true] {
        let seq: Vec<usize> = if reversed {
            order.iter().rev().map(|&i| space[i]).collect()
        } else {
            order.iter().map(|&i| space[i]).collect()
        };
        let n = graph.vertex_count();
        let mut in_set = vec![false; n];
        let mut touch = vec![0u32; n];
        let mut boundary = 0usize;
        let mut best_len = 0;
        let mut best_b = 0;
        for (len, &w) in seq.iter().take(limit).enumerate() {
            if touch[w] > 0 {
                boundary -= 1;
            }
            in_set[w] = true;
            for &x in graph.neighbors(w) {
                touch[x] += 1;
                if !in_set[x] && touch[x] == 1 {
                    boundary += 1;
                }
            }
            let size = len + 1;
            if best_len == 0 || boundary * best_len < best_b * size {
                best_len = size;
                best_b = boundary;
            }
        }
        if best_len > 0 {
            let mut set = seq[..best_len].to_vec();
            set.sort_unstable();
            best = better(best, Some(Candidate { boundary: best_b, set }));
        }
    }
    best
}
