//! Graph-side quantities: shortest paths, Cheeger constants, Gromov
//! hyperbolicity, boundary proxies and poles.

mod boundary;
mod cheeger;
mod edgelist;
mod hyperbolicity;
mod pole;

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;
use thiserror::Error;

pub use boundary::{
    boundary_proxy, uniform_perfectness, BoundaryProxy, Perfectness, PerfectnessCheck, DEFAULT_EPS0_GRID,
    DEFAULT_S_GRID,
};
pub use cheeger::{cheeger, CheegerMethod, CheegerMode, CheegerModeKind, CheegerReport, EXHAUSTIVE_LIMIT};
pub use edgelist::{parse_edge_list, write_edge_list, EdgeList};
pub use hyperbolicity::{
    four_point_delta, gromov_product, hyperbolicity_delta, hyperbolicity_sampled, HyperbolicityReport,
    HYPERBOLICITY_CAP,
};
pub use pole::{has_pole, pole_radius};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("invalid edge weight {0}")]
    BadWeight(f64),
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertices {0} and {1} are not connected")]
    Unreachable(usize, usize),
    #[error("graph has {n} vertices, above the exact-mode cap of {cap}; use sampled mode")]
    TooLarge { n: usize, cap: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{0}")]
    Parameter(String),
}

/// Simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds from an edge list; duplicate edges are merged, self-loops dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange(x));
                }
            }
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        self.adj.is_empty() || bfs(self, 0).iter().all(|d| d.is_some())
    }

    pub fn to_weighted(&self) -> WeightedGraph {
        WeightedGraph {
            adj: self
                .adj
                .iter()
                .map(|l| l.iter().map(|&v| (v, 1.0)).collect())
                .collect(),
        }
    }

    /// Vertices at distance exactly 1 from `set`.
    pub fn vertex_boundary(&self, set: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.adj.len()];
        for &v in set {
            inside[v] = true;
        }
        let mut hit = vec![false; self.adj.len()];
        for &v in set {
            for &w in &self.adj[v] {
                if !inside[w] {
                    hit[w] = true;
                }
            }
        }
        (0..self.adj.len()).filter(|&v| hit[v]).collect()
    }
}

/// Undirected graph with positive edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    adj: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    /// Parallel edges keep the smallest weight; self-loops are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange(x));
                }
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(GraphError::BadWeight(w));
            }
            if u != v {
                adj[u].push((v, w));
                adj[v].push((u, w));
            }
        }
        for list in &mut adj {
            list.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            list.dedup_by_key(|e| e.0);
        }
        Ok(Self { adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |e| e.0 > u)
                .map(move |&(v, w)| (u, v, w))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn unweighted(&self) -> Graph {
        Graph {
            adj: self.adj.iter().map(|l| l.iter().map(|e| e.0).collect()).collect(),
        }
    }
}

/// Dense all-pairs distance matrix; `f64::INFINITY` marks unreachable pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Distances {
    n: usize,
    d: Vec<f64>,
}

impl Distances {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.d[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.d[u * self.n..(u + 1) * self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.d.iter().all(|x| x.is_finite())
    }

    fn from_rows(n: usize, rows: Vec<Vec<f64>>) -> Self {
        Self {
            n,
            d: rows.into_iter().flatten().collect(),
        }
    }
}

pub fn bfs(graph: &Graph, source: usize) -> Vec<Option<usize>> {
    multi_source_bfs(graph, &[source])
}

/// Hop distance to the nearest source.
pub fn multi_source_bfs(graph: &Graph, sources: &[usize]) -> Vec<Option<usize>> {
    let mut dist = vec![None; graph.vertex_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u].expect("queued vertices have a distance");
        for &w in graph.neighbors(u) {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// All-pairs hop distances, one BFS per source in parallel.
pub fn all_pairs_hops(graph: &Graph) -> Distances {
    let n = graph.vertex_count();
    let rows = (0..n)
        .into_par_iter()
        .map(|s| {
            bfs(graph, s)
                .into_iter()
                .map(|d| d.map_or(f64::INFINITY, |x| x as f64))
                .collect()
        })
        .collect();
    Distances::from_rows(n, rows)
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Weighted distance to the nearest source.
pub fn dijkstra(graph: &WeightedGraph, sources: &[usize]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.vertex_count()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(HeapEntry(0.0, s));
    }
    while let Some(HeapEntry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in graph.neighbors(u) {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapEntry(nd, v));
            }
        }
    }
    dist
}

pub fn all_pairs_weighted(graph: &WeightedGraph) -> Distances {
    let n = graph.vertex_count();
    let rows = (0..n).into_par_iter().map(|s| dijkstra(graph, &[s])).collect();
    Distances::from_rows(n, rows)
}

/// Eccentricity of `v` in hops, `None` if some vertex is unreachable.
pub fn eccentricity(graph: &Graph, v: usize) -> Option<usize> {
    bfs(graph, v).into_iter().try_fold(0, |m, d| d.map(|d| m.max(d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn graph_construction_normalizes() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 0), (2, 2), (2, 3)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (2, 3)]);
        assert!(!g.is_connected());
        assert!(Graph::from_edges(2, &[(0, 2)]).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 1, 0.0)]).is_err());
        let w = WeightedGraph::from_edges(2, &[(0, 1, 2.0), (1, 0, 0.5)]).unwrap();
        assert_eq!(w.neighbors(0), &[(1, 0.5)]);
    }

    #[test]
    fn dijkstra_matches_bfs_on_unit_weights() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = generate::random_connected(&mut rng, 40, 20);
            assert_eq!(all_pairs_hops(&g), all_pairs_weighted(&g.to_weighted()));
        }
    }

    #[test]
    fn cycle_distances() {
        let d = all_pairs_hops(&generate::cycle(9));
        assert_eq!(d.get(0, 4), 4.0);
        assert_eq!(d.get(0, 5), 4.0);
        assert_eq!(d.get(3, 3), 0.0);
        assert_eq!(eccentricity(&generate::path(6), 0), Some(5));
    }

    #[test]
    fn vertex_boundary_of_path_interval() {
        let g = generate::path(10);
        assert_eq!(g.vertex_boundary(&[3, 4, 5]), vec![2, 6]);
        assert!(g.vertex_boundary(&(0..10).collect::<Vec<_>>()).is_empty());
    }
}
