//! Seeded random instances for tests, benchmarks and the acceptance suite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graphtools::Graph;
use crate::surface::{Gluing, SlotRef, SurfaceSpec, SLOTS_PER_PIECE};

fn random_length<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.3) {
        rng.gen_range(0.005..0.35)
    } else {
        rng.gen_range(0.4..3.0)
    }
}

/// A connected spec with `k` pieces: a random spanning tree of gluings, then
/// random extra gluings (self-gluings allowed) among the free slots, the rest
/// cusps. About a third of the lengths are short.
pub fn random_spec<R: Rng>(rng: &mut R, k: usize) -> SurfaceSpec {
    assert!(k >= 1);
    let mut free: Vec<SlotRef> = (0..SLOTS_PER_PIECE).map(|s| SlotRef(0, s)).collect();
    let mut gluings = Vec::new();
    for p in 1..k {
        let at = rng.gen_range(0..free.len());
        let host = free.swap_remove(at);
        let own = rng.gen_range(0..SLOTS_PER_PIECE);
        gluings.push(Gluing {
            a: host,
            b: SlotRef(p, own),
            length: random_length(rng),
        });
        free.extend((0..SLOTS_PER_PIECE).filter(|&s| s != own).map(|s| SlotRef(p, s)));
    }
    free.shuffle(rng);
    let extra = rng.gen_range(0..=free.len() / 2);
    for _ in 0..extra {
        let a = free.pop().expect("two free slots");
        let b = free.pop().expect("two free slots");
        gluings.push(Gluing {
            a,
            b,
            length: random_length(rng),
        });
    }
    free.sort();
    SurfaceSpec {
        pieces: k,
        gluings,
        cusps: free,
        window: None,
    }
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges).expect("valid path")
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3);
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges).expect("valid cycle")
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j));
        }
    }
    Graph::from_edges(n, &edges).expect("valid complete graph")
}

/// Uniform random recursive tree.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    Graph::from_edges(n, &edges).expect("valid tree")
}

/// A random tree plus `extra` random chords; always connected.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, extra: usize) -> Graph {
    let mut edges: Vec<_> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    if n >= 2 {
        for _ in 0..extra {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("valid graph")
}

/// Complete binary tree of the given depth; vertex `i` has children `2i+1`, `2i+2`.
pub fn binary_tree(depth: usize) -> Graph {
    let n = (1usize << (depth + 1)) - 1;
    let edges: Vec<_> = (1..n).map(|i| ((i - 1) / 2, i)).collect();
    Graph::from_edges(n, &edges).expect("valid tree")
}
