use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{NetError, NetGraph, QuotientMesh};
use crate::graphtools::{all_pairs_hops, all_pairs_weighted, Distances, GraphError};

pub const GRID_STEP: f64 = 0.25;
pub const ALPHA_GRID_MAX: f64 = 8.0;

/// Rounds up to the next grid point.
pub fn quantize(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (x / GRID_STEP - 1e-9).ceil() * GRID_STEP
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QiEstimate {
    pub alpha: f64,
    pub beta: f64,
    /// Largest distance from a vertex of `B` to the image, rounded up to the grid.
    pub fullness: f64,
    /// Unrounded values at the chosen `alpha`.
    pub raw_beta: f64,
    pub raw_fullness: f64,
    pub marked_vertices: usize,
}

/// Quasi-isometry constants of `map` from `A` to `B`.
///
/// For each `alpha` in `{1, 1.25, ..., 8}` the least `beta` with
/// `d_A / alpha - beta <= d_B <= alpha d_A + beta` over all marked pairs is
/// rounded up to the grid; the pair minimizing `alpha + beta` wins, ties going
/// to the smaller `alpha`. Vertices mapped to `None` are left out.
pub fn estimate_qi_constants(da: &Distances, db: &Distances, map: &[Option<usize>]) -> Result<QiEstimate, NetError> {
    if map.len() != da.vertex_count() {
        return Err(NetError::Parameter(format!(
            "map covers {} vertices, graph has {}",
            map.len(),
            da.vertex_count()
        )));
    }
    let marked: Vec<(usize, usize)> = map
        .iter()
        .enumerate()
        .filter_map(|(v, m)| m.map(|m| (v, m)))
        .collect();
    if let Some(&(_, m)) = marked.iter().find(|&&(_, m)| m >= db.vertex_count()) {
        return Err(GraphError::VertexOutOfRange(m).into());
    }
    if marked.is_empty() {
        return Err(NetError::Parameter("map has no marked vertices".into()));
    }
    let steps = ((ALPHA_GRID_MAX - 1.0) / GRID_STEP).round() as usize;
    let alphas: Vec<f64> = (0..=steps).map(|k| 1.0 + k as f64 * GRID_STEP).collect();

    let worst = marked
        .par_iter()
        .enumerate()
        .map(|(i, &(x, fx))| {
            let mut w = vec![0.0f64; alphas.len()];
            for &(y, fy) in &marked[i + 1..] {
                let a = da.get(x, y);
                let b = db.get(fx, fy);
                if !a.is_finite() || !b.is_finite() {
                    return Err(GraphError::Unreachable(x, y));
                }
                for (k, &alpha) in alphas.iter().enumerate() {
                    w[k] = w[k].max(a / alpha - b).max(b - alpha * a);
                }
            }
            Ok(w)
        })
        .try_reduce(
            || vec![0.0; alphas.len()],
            |mut l, r| {
                for (a, b) in l.iter_mut().zip(r) {
                    *a = a.max(b);
                }
                Ok(l)
            },
        )?;

    let mut best = 0;
    for k in 1..alphas.len() {
        if alphas[k] + quantize(worst[k]) < alphas[best] + quantize(worst[best]) - 1e-12 {
            best = k;
        }
    }
    let images: Vec<usize> = marked.iter().map(|&(_, m)| m).collect();
    let mut raw_fullness = 0.0f64;
    for v in 0..db.vertex_count() {
        let d = images.iter().map(|&m| db.get(m, v)).fold(f64::INFINITY, f64::min);
        if !d.is_finite() {
            return Err(GraphError::Unreachable(images[0], v).into());
        }
        raw_fullness = raw_fullness.max(d);
    }
    Ok(QiEstimate {
        alpha: alphas[best],
        beta: quantize(worst[best]),
        fullness: quantize(raw_fullness),
        raw_beta: worst[best],
        raw_fullness,
        marked_vertices: marked.len(),
    })
}

/// Constants of the inclusion of the net graph (hop metric) into its mesh.
pub fn net_vs_mesh_qi(net: &NetGraph, mesh: &QuotientMesh) -> Result<QiEstimate, NetError> {
    let da = all_pairs_hops(net.graph());
    let db = all_pairs_weighted(&mesh.graph);
    estimate_qi_constants(&da, &db, &mesh.vertex_map)
}

#[cfg(test)]
mod tests {
    use super::super::tests::flute;
    use super::super::{build_quotient_mesh, NetBuildParams};
    use super::*;
    use crate::generate;
    use crate::graphtools::Graph;
    use crate::hypmath::MargulisParam;

    #[test]
    fn grid_rounding() {
        assert_eq!(quantize(0.0), 0.0);
        assert_eq!(quantize(-1.0), 0.0);
        assert_eq!(quantize(0.25), 0.25);
        assert_eq!(quantize(0.26), 0.5);
        assert_eq!(quantize(1.0 + 1e-12), 1.0);
    }

    #[test]
    fn identity_map() {
        let g = generate::cycle(9);
        let d = all_pairs_hops(&g);
        let map: Vec<Option<usize>> = (0..9).map(Some).collect();
        let q = estimate_qi_constants(&d, &d, &map).unwrap();
        assert_eq!((q.alpha, q.beta, q.fullness), (1.0, 0.0, 0.0));
    }

    #[test]
    fn path_onto_even_vertices() {
        let g = generate::path(100);
        let d = all_pairs_hops(&g);
        let map: Vec<Option<usize>> = (0..100).map(|i| Some(i - i % 2)).collect();
        // brute force over pairs: |d_B - d_A| is at most 1 and reaches 1
        let mut worst = 0.0f64;
        for x in 0..100 {
            for y in 0..100 {
                let fx = map[x].unwrap();
                let fy = map[y].unwrap();
                worst = worst.max((d.get(fx, fy) - d.get(x, y)).abs());
            }
        }
        assert_eq!(worst, 1.0);
        let q = estimate_qi_constants(&d, &d, &map).unwrap();
        assert_eq!((q.alpha, q.beta, q.fullness), (1.0, 1.0, 1.0));
    }

    #[test]
    fn scaled_path() {
        // P50 into P100 by doubling
        let a = all_pairs_hops(&generate::path(50));
        let b = all_pairs_hops(&generate::path(100));
        let map: Vec<Option<usize>> = (0..50).map(|i| Some(2 * i)).collect();
        let q = estimate_qi_constants(&a, &b, &map).unwrap();
        assert_eq!((q.alpha, q.beta, q.fullness), (2.0, 0.0, 1.0));
    }

    #[test]
    fn unreachable_pairs_error() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let d = all_pairs_hops(&g);
        let map: Vec<Option<usize>> = (0..4).map(Some).collect();
        assert!(matches!(
            estimate_qi_constants(&d, &d, &map),
            Err(NetError::Graph(GraphError::Unreachable(..)))
        ));
        let short = vec![Some(0); 3];
        assert!(estimate_qi_constants(&d, &d, &short).is_err());
    }

    #[test]
    fn flute_constants_are_stable() {
        let params = NetBuildParams::default_for(MargulisParam::default_value());
        let mut estimates = Vec::new();
        for n in [5, 10, 20] {
            let (net, mesh) = build_quotient_mesh(&flute(n), params, 1).unwrap();
            estimates.push(net_vs_mesh_qi(&net, &mesh).unwrap());
        }
        for q in &estimates[1..] {
            assert!((q.alpha - estimates[0].alpha).abs() <= GRID_STEP, "{estimates:?}");
            assert!((q.beta - estimates[0].beta).abs() <= GRID_STEP, "{estimates:?}");
            assert!((q.fullness - estimates[0].fullness).abs() <= GRID_STEP, "{estimates:?}");
        }
    }
}
