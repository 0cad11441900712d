//! Finite stand-ins for the boundary at infinity: the sphere of radius `R`
//! about a base point, carrying the visual quasi-metric `a^{-(x|y)_o}`.

use serde::{Deserialize, Serialize};

use super::{bfs, gromov_product, Distances, Graph, GraphError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryProxy {
    pub base: usize,
    pub radius: usize,
    pub visual_param: f64,
    /// Vertices at distance exactly `radius` from `base`, ascending.
    pub proxy_points: Vec<usize>,
    /// Row-major `k x k` Gromov products `(x|y)_o`.
    pub products: Vec<f64>,
    /// Row-major `k x k`, `a^{-(x|y)_o}` off the diagonal, zero on it.
    pub quasi_metric: Vec<f64>,
}

impl BoundaryProxy {
    pub fn len(&self) -> usize {
        self.proxy_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.proxy_points.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.quasi_metric[i * self.len() + j]
    }

    pub fn product(&self, i: usize, j: usize) -> f64 {
        self.products[i * self.len() + j]
    }
}

/// `dist` must be the hop metric of `graph`.
pub fn boundary_proxy(
    graph: &Graph,
    dist: &Distances,
    base: usize,
    radius: usize,
    a: f64,
) -> Result<BoundaryProxy, GraphError> {
    if base >= graph.vertex_count() {
        return Err(GraphError::VertexOutOfRange(base));
    }
    if !(a > 1.0 && a.is_finite()) {
        return Err(GraphError::Parameter(format!("visual parameter must exceed 1, got {a}")));
    }
    if radius == 0 {
        return Err(GraphError::Parameter("radius must be positive".into()));
    }
    let hops = bfs(graph, base);
    let ecc = hops.iter().flatten().copied().max().unwrap_or(0);
    if radius > ecc {
        return Err(GraphError::Parameter(format!(
            "radius {radius} exceeds the eccentricity {ecc} of vertex {base}"
        )));
    }
    let points: Vec<usize> = (0..graph.vertex_count())
        .filter(|&v| hops[v] == Some(radius))
        .collect();
    let k = points.len();
    let mut products = vec![0.0; k * k];
    let mut metric = vec![0.0; k * k];
    for (i, &x) in points.iter().enumerate() {
        for (j, &y) in points.iter().enumerate() {
            let p = gromov_product(dist, x, y, base);
            products[i * k + j] = p;
            if i != j {
                metric[i * k + j] = a.powf(-p);
            }
        }
    }
    Ok(BoundaryProxy {
        base,
        radius,
        visual_param: a,
        proxy_points: points,
        products,
        quasi_metric: metric,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfectnessCheck {
    pub s: f64,
    pub eps0: f64,
    pub passes: bool,
    /// First proxy index (and scale) that fails, if any.
    pub failure: Option<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perfectness {
    /// Least passing `S` at the largest `eps0` for which any `S` passes.
    pub best: Option<(f64, f64)>,
    pub reason: Option<String>,
    pub table: Vec<PerfectnessCheck>,
}

pub const DEFAULT_S_GRID: [f64; 8] = [1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0];
pub const DEFAULT_EPS0_GRID: [f64; 3] = [0.5, 0.25, 0.125];

/// Checks, for point `x` with sorted positive distances `ds`, that every
/// scale `eps` in `[min(ds[0], eps0), eps0]` has some `y` with
/// `eps/S < d(x, y) <= eps`. Returns a failing scale.
fn point_failure(ds: &[f64], s: f64, eps0: f64) -> Option<f64> {
    let Some(&first) = ds.first() else {
        return Some(eps0);
    };
    if first > eps0 {
        return Some(eps0);
    }
    // For eps in [d_k, next) the best witness is d_k; it fails once eps >= S d_k.
    for (k, &d) in ds.iter().enumerate() {
        if d > eps0 {
            break;
        }
        match ds.get(k + 1) {
            Some(&next) if next <= eps0 => {
                if s * d < next {
                    return Some(s * d);
                }
            }
            _ => {
                if s * d <= eps0 {
                    return Some(eps0);
                }
            }
        }
    }
    None
}

fn check(proxy: &BoundaryProxy, s: f64, eps0: f64) -> PerfectnessCheck {
    let k = proxy.len();
    let mut failure = None;
    for i in 0..k {
        let mut ds: Vec<f64> = (0..k).filter(|&j| j != i).map(|j| proxy.distance(i, j)).collect();
        ds.sort_by(f64::total_cmp);
        ds.dedup();
        if let Some(eps) = point_failure(&ds, s, eps0) {
            failure = Some((i, eps));
            break;
        }
    }
    PerfectnessCheck {
        s,
        eps0,
        passes: failure.is_none(),
        failure,
    }
}

/// Uniform perfectness of a proxy over grids of `S` and `eps0`.
///
/// Scales run over the interval from each point's nearest-neighbor distance
/// up to `eps0`; below that every finite space is trivially imperfect.
/// Proxies with fewer than three points fail outright.
pub fn uniform_perfectness(proxy: &BoundaryProxy, s_grid: &[f64], eps0_grid: &[f64]) -> Perfectness {
    if proxy.len() < 3 {
        return Perfectness {
            best: None,
            reason: Some(format!("proxy has {} point(s); need at least 3", proxy.len())),
            table: Vec::new(),
        };
    }
    let mut s_sorted = s_grid.to_vec();
    s_sorted.sort_by(f64::total_cmp);
    let mut e_sorted = eps0_grid.to_vec();
    e_sorted.sort_by(|a, b| b.total_cmp(a));
    let mut table = Vec::new();
    let mut best = None;
    for &eps0 in &e_sorted {
        for &s in &s_sorted {
            let c = check(proxy, s, eps0);
            if c.passes && best.is_none() {
                best = Some((s, eps0));
            }
            table.push(c);
        }
    }
    let reason = best.is_none().then(|| "no grid point passes".to_string());
    Perfectness { best, reason, table }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::graphtools::{all_pairs_hops, hyperbolicity_delta};

    fn proxy(g: &Graph, o: usize, r: usize) -> BoundaryProxy {
        boundary_proxy(g, &all_pairs_hops(g), o, r, 2.0).unwrap()
    }

    #[test]
    fn star_proxy_is_discrete() {
        let edges: Vec<_> = (1..6).map(|i| (0, i)).collect();
        let g = Graph::from_edges(6, &edges).unwrap();
        let p = proxy(&g, 0, 1);
        assert_eq!(p.proxy_points, vec![1, 2, 3, 4, 5]);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(p.distance(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
        assert!(boundary_proxy(&g, &all_pairs_hops(&g), 0, 2, 2.0).is_err());
        assert!(boundary_proxy(&g, &all_pairs_hops(&g), 0, 1, 1.0).is_err());
    }

    /// Leaves of a binary tree: `d(x, y) = a^{-depth of the common ancestor}`.
    #[test]
    fn binary_tree_proxy_matches_ancestor_depth() {
        let depth = 6;
        let g = generate::binary_tree(depth);
        let p = proxy(&g, 0, depth);
        assert_eq!(p.len(), 1 << depth);
        let depth_of = |mut v: usize| {
            let mut d = 0;
            while v > 0 {
                v = (v - 1) / 2;
                d += 1;
            }
            d
        };
        for (i, &x) in p.proxy_points.iter().enumerate() {
            for (j, &y) in p.proxy_points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let (mut u, mut v) = (x, y);
                while u != v {
                    if u > v {
                        u = (u - 1) / 2;
                    } else {
                        v = (v - 1) / 2;
                    }
                }
                assert_eq!(p.distance(i, j), 2f64.powi(-depth_of(u)));
            }
        }
    }

    #[test]
    fn binary_tree_is_uniformly_perfect() {
        let g = generate::binary_tree(8);
        let p = proxy(&g, 0, 8);
        let r = uniform_perfectness(&p, &DEFAULT_S_GRID, &DEFAULT_EPS0_GRID);
        let (s, eps0) = r.best.unwrap();
        assert!(s <= 4.0 && eps0 == 0.5, "{:?}", r.best);
    }

    #[test]
    fn small_or_clustered_proxies_fail() {
        let g = generate::path(5);
        let p = proxy(&g, 2, 2);
        assert_eq!(p.len(), 2);
        assert!(uniform_perfectness(&p, &DEFAULT_S_GRID, &DEFAULT_EPS0_GRID).best.is_none());
        // a tight cluster has nothing at scale eps0
        assert!(point_failure(&[1.0 / 1024.0, 1.0 / 512.0], 16.0, 0.5).is_some());
        assert!(point_failure(&[0.25, 0.5], 2.0, 0.5).is_none());
        assert_eq!(point_failure(&[0.25, 0.5], 1.5, 0.5), Some(0.375));
        assert_eq!(point_failure(&[0.75], 16.0, 0.5), Some(0.5));
    }

    #[test]
    fn perfectness_is_monotone_in_s() {
        let g = generate::binary_tree(7);
        let p = proxy(&g, 0, 7);
        let r = uniform_perfectness(&p, &DEFAULT_S_GRID, &DEFAULT_EPS0_GRID);
        for eps0 in DEFAULT_EPS0_GRID {
            let row: Vec<bool> = r.table.iter().filter(|c| c.eps0 == eps0).map(|c| c.passes).collect();
            assert!(row.windows(2).all(|w| !w[0] || w[1]), "{row:?}");
        }
    }

    #[test]
    fn quasi_ultrametric_inequality() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let g = generate::random_connected(&mut rng, 40, 8);
            let d = all_pairs_hops(&g);
            let delta = hyperbolicity_delta(&g).unwrap().delta;
            let p = boundary_proxy(&g, &d, 0, 3.min(crate::graphtools::eccentricity(&g, 0).unwrap()), 2.0)
                .unwrap();
            let k = p.len();
            for x in 0..k {
                for y in 0..k {
                    for z in 0..k {
                        let bound = 2f64.powf(delta) * p.distance(x, y).max(p.distance(y, z));
                        assert!(x == z || p.distance(x, z) <= bound + 1e-12);
                    }
                }
            }
        }
    }
}
