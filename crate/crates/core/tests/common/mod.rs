//! Seeded graph generators shared by the integration tests.
#![allow(dead_code)]

use discord_lab::graph::Graph;
use discord_lab::spectral::SymMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected graph: a random spanning tree plus each remaining pair with
/// probability `p`. Weights are uniform in `[0.1, 2)` unless `unit`.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, p: f64, unit: bool) -> Graph {
    let mut edges = Vec::new();
    let mut present = vec![vec![false; n]; n];
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    for k in 1..n {
        let u = order[k];
        let v = order[rng.random_range(0..k)];
        present[u][v] = true;
        present[v][u] = true;
        edges.push((u.min(v), u.max(v)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present[u][v] && rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let weighted: Vec<(usize, usize, f64)> = edges
        .into_iter()
        .map(|(u, v)| {
            (
                u,
                v,
                if unit {
                    1.0
                } else {
                    rng.random_range(0.1..2.0)
                },
            )
        })
        .collect();
    Graph::new(n, weighted).unwrap()
}

/// Random connected graph with `n` in `lo..=hi` and density in `[0.05, 0.6)`.
pub fn random_graph(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Graph {
    let n = rng.random_range(lo..=hi);
    let p = rng.random_range(0.05..0.6);
    let unit = rng.random_bool(0.3);
    random_connected(rng, n, p, unit)
}

/// Laplacian scaled to trace `target`.
pub fn trace_normalized(g: &Graph, target: f64) -> SymMatrix {
    let l = g.laplacian();
    let t = l.trace();
    l.scaled(target / t)
}

/// Vector with `‖x‖² = n`.
pub fn random_sphere_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter().map(|v| v * (n as f64).sqrt() / norm).collect()
}
