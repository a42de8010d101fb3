//! Seeded synthetic graphs for tests, benchmarks and demo datasets.

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::community::CommunityAssignment;
use crate::graph::{Graph, NodeId};
use crate::{Error, Result};

fn node_names(n: usize) -> Vec<Arc<str>> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| Arc::from(format!("n{i:0width$}"))).collect()
}

fn check_probability(p: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must be in [0, 1], got {p}")))
    }
}

/// Erdős–Rényi G(n, p) with unit weights; isolated nodes are kept.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_probability(p, "edge probability")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v, 1.0));
            }
        }
    }
    Graph::from_parts(node_names(n), edges)
}

/// G(n, m): exactly `m` distinct edges drawn uniformly, unit weights.
pub fn gnm(n: usize, m: usize, seed: u64) -> Result<Graph> {
    Graph::from_parts(
        node_names(n),
        gnm_pairs(n, m, seed)?.into_iter().map(|(u, v)| (u, v, 1.0)),
    )
}

fn gnm_pairs(n: usize, m: usize, seed: u64) -> Result<Vec<(NodeId, NodeId)>> {
    let possible = n * n.saturating_sub(1) / 2;
    if m > possible {
        return Err(Error::domain(format!("{m} edges do not fit in {n} nodes")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(m);
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            out.push(key);
        }
    }
    Ok(out)
}

/// Planted partition (two-level stochastic block model): `blocks` groups of
/// `block_size` nodes, pairs inside a group linked with `p_in`, across groups
/// with `p_out`. Node `i` belongs to block `i / block_size`.
pub fn planted_partition(blocks: usize, block_size: usize, p_in: f64, p_out: f64, seed: u64) -> Result<Graph> {
    check_probability(p_in, "p_in")?;
    check_probability(p_out, "p_out")?;
    let n = blocks * block_size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if u / block_size == v / block_size { p_in } else { p_out };
            if rng.gen_bool(p) {
                edges.push((u, v, 1.0));
            }
        }
    }
    Graph::from_parts(node_names(n), edges)
}

/// The block structure produced by [`planted_partition`].
pub fn planted_assignment(blocks: usize, block_size: usize) -> CommunityAssignment {
    let raw: Vec<usize> = (0..blocks * block_size).map(|i| i / block_size).collect();
    CommunityAssignment::from_raw(&raw)
}

/// Connected graph: a random recursive tree plus `extra_edges` random chords,
/// with integer weights drawn from `1..=max_weight`.
pub fn random_connected(n: usize, extra_edges: usize, max_weight: u32, seed: u64) -> Result<Graph> {
    if n == 0 || max_weight == 0 {
        return Err(Error::domain("random_connected needs n > 0 and max_weight > 0"));
    }
    let possible = n * (n - 1) / 2;
    let target = (n - 1 + extra_edges).min(possible);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(target);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        seen.insert((u, v));
        edges.push((u, v, f64::from(rng.gen_range(1..=max_weight))));
    }
    while edges.len() < target {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || !seen.insert((u.min(v), u.max(v))) {
            continue;
        }
        edges.push((u.min(v), u.max(v), f64::from(rng.gen_range(1..=max_weight))));
    }
    Graph::from_parts(node_names(n), edges)
}

/// Rows of a co-occurrence style edge list over `n` named characters and
/// `m` distinct pairs, with integer interaction weights. `duplicates` extra
/// rows repeat earlier pairs with reversed orientation and a new weight.
pub fn edge_list_rows(n: usize, m: usize, duplicates: usize, seed: u64) -> Result<Vec<(String, String, f64)>> {
    let pairs = gnm_pairs(n, m, seed)?;
    if duplicates > 0 && pairs.is_empty() {
        return Err(Error::domain("cannot duplicate rows of an empty edge list"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let name = |i: usize| format!("Character-{i:04}");
    let mut rows: Vec<(String, String, f64)> = pairs
        .iter()
        .map(|&(u, v)| (name(u), name(v), f64::from(rng.gen_range(3..=120u32))))
        .collect();
    for _ in 0..duplicates {
        let (u, v) = pairs[rng.gen_range(0..pairs.len())];
        rows.push((name(v), name(u), f64::from(rng.gen_range(3..=120u32))));
    }
    Ok(rows)
}
