#![allow(dead_code)]

use std::sync::Arc;

use graphsci_core::Graph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(n: usize) -> Vec<Arc<str>> {
    (0..n).map(|i| Arc::from(format!("v{i:03}"))).collect()
}

/// Unit-weight graph whose node ids equal the oracle's indices.
pub fn graph_from(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_parts(names(n), edges.iter().map(|&(u, v)| (u, v, 1.0))).unwrap()
}

pub fn weighted_graph_from(n: usize, edges: &[(usize, usize, f64)]) -> Graph {
    Graph::from_parts(names(n), edges.iter().copied()).unwrap()
}
