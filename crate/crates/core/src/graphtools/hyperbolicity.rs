use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{all_pairs_hops, Distances, Graph, GraphError};

/// Exact mode refuses larger vertex sets; the loop is quartic.
pub const HYPERBOLICITY_CAP: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub delta: f64,
    pub witness_quadruple: [usize; 4],
    /// Largest violation of the Gromov-product inequality over base points
    /// taken from the witness; agrees with `delta`.
    pub base_dependence: f64,
    /// False in sampled mode, where `delta` is only a lower bound.
    pub exact: bool,
    pub quadruples_examined: u64,
}

pub fn gromov_product(dist: &Distances, x: usize, y: usize, o: usize) -> f64 {
    0.5 * (dist.get(x, o) + dist.get(y, o) - dist.get(x, y))
}

fn quad_value(d: &Distances, q: [usize; 4]) -> f64 {
    let [i, j, k, l] = q;
    let mut s = [
        d.get(i, j) + d.get(k, l),
        d.get(i, k) + d.get(j, l),
        d.get(i, l) + d.get(j, k),
    ];
    s.sort_by(f64::total_cmp);
    (s[2] - s[1]) / 2.0
}

/// Prefers the larger value, then the lexicographically smaller quadruple.
fn better(a: (f64, [usize; 4]), b: (f64, [usize; 4])) -> (f64, [usize; 4]) {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if a.1 <= b.1 {
                a
            } else {
                b
            }
        }
    }
}

/// Worst violation of `(x|y)_o >= min((x|z)_o, (z|y)_o) - delta` at base `o`.
fn base_violation(d: &Distances, o: usize) -> f64 {
    let n = d.vertex_count();
    (0..n)
        .into_par_iter()
        .map(|x| {
            let mut worst = 0.0f64;
            for y in 0..n {
                let xy = gromov_product(d, x, y, o);
                for z in 0..n {
                    let m = gromov_product(d, x, z, o).min(gromov_product(d, z, y, o));
                    worst = worst.max(m - xy);
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Four-point hyperbolicity constant of a finite metric given by `dist`.
pub fn four_point_delta(dist: &Distances, cap: usize) -> Result<HyperbolicityReport, GraphError> {
    let n = dist.vertex_count();
    if n > cap {
        return Err(GraphError::TooLarge { n, cap });
    }
    if !dist.is_finite() {
        return Err(GraphError::Disconnected);
    }
    if n < 4 {
        return Ok(HyperbolicityReport {
            delta: 0.0,
            witness_quadruple: [0; 4],
            base_dependence: 0.0,
            exact: true,
            quadruples_examined: 0,
        });
    }
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = (f64::NEG_INFINITY, [usize::MAX; 4]);
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        let q = [i, j, k, l];
                        let v = quad_value(dist, q);
                        if v > best.0 {
                            best = (v, q);
                        }
                    }
                }
            }
            best
        })
        .reduce(|| (f64::NEG_INFINITY, [usize::MAX; 4]), better);
    let base_dependence = best
        .1
        .iter()
        .map(|&o| base_violation(dist, o))
        .fold(0.0, f64::max);
    let n = n as u64;
    Ok(HyperbolicityReport {
        delta: best.0,
        witness_quadruple: best.1,
        base_dependence,
        exact: true,
        quadruples_examined: n * (n - 1) * (n - 2) * (n - 3) / 24,
    })
}

pub fn hyperbolicity_delta(graph: &Graph) -> Result<HyperbolicityReport, GraphError> {
    if graph.vertex_count() > HYPERBOLICITY_CAP {
        return Err(GraphError::TooLarge {
            n: graph.vertex_count(),
            cap: HYPERBOLICITY_CAP,
        });
    }
    four_point_delta(&all_pairs_hops(graph), HYPERBOLICITY_CAP)
}

/// Lower bound on the four-point constant from `samples` seeded random
/// quadruples of distinct vertices.
pub fn hyperbolicity_sampled(
    dist: &Distances,
    samples: u64,
    seed: u64,
) -> Result<HyperbolicityReport, GraphError> {
    let n = dist.vertex_count();
    if n < 4 {
        return four_point_delta(dist, usize::MAX);
    }
    if !dist.is_finite() {
        return Err(GraphError::Disconnected);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (f64::NEG_INFINITY, [usize::MAX; 4]);
    for _ in 0..samples {
        let mut q = [0usize; 4];
        let mut filled = 0;
        while filled < 4 {
            let v = rng.gen_range(0..n);
            if !q[..filled].contains(&v) {
                q[filled] = v;
                filled += 1;
            }
        }
        q.sort_unstable();
        best = better(best, (quad_value(dist, q), q));
    }
    Ok(HyperbolicityReport {
        delta: best.0,
        witness_quadruple: best.1,
        base_dependence: best.0,
        exact: false,
        quadruples_examined: samples,
    })
}
