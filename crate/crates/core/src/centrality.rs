//! PageRank and betweenness centrality.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::graph::{NodeId, Topology};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PageRankConfig {
    pub damping: f64,
    pub max_iterations: usize,
    /// Early exit once the L1 change between iterations is at most this.
    pub tolerance: f64,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        Self {
            damping: 0.85,
            max_iterations: 20,
            tolerance: 0.0,
        }
    }
}

impl PageRankConfig {
    fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::domain(format!(
                "damping must be in (0, 1), got {}",
                self.damping
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::domain("max_iterations must be positive"));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::domain("tolerance must be non-negative"));
        }
        Ok(())
    }
}

/// One real score per node, indexed by [`NodeId`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMap {
    names: Vec<Arc<str>>,
    scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedScore {
    pub node: String,
    pub score: f64,
}

impl ScoreMap {
    pub fn new(names: Vec<Arc<str>>, scores: Vec<f64>) -> Result<Self> {
        if names.len() != scores.len() {
            return Err(Error::domain("score count does not match node count"));
        }
        if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::domain(format!("non-finite score for node `{}`", names[i])));
        }
        Ok(Self { names, scores })
    }

    fn from_topology<T: Topology + ?Sized>(g: &T, scores: Vec<f64>) -> Self {
        Self {
            names: g.names().to_vec(),
            scores,
        }
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn get(&self, u: NodeId) -> Option<f64> {
        self.scores.get(u).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn name(&self, u: NodeId) -> &str {
        &self.names[u]
    }

    /// Node ids ordered by descending score, ties by ascending name.
    pub fn ranking(&self) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = (0..self.scores.len()).collect();
        ids.sort_by(|&a, &b| {
            self.scores[b]
                .total_cmp(&self.scores[a])
                .then_with(|| self.names[a].cmp(&self.names[b]))
        });
        ids
    }
}

/// The `k` highest-scoring nodes, descending, ties broken by ascending name.
pub fn top_k(scores: &ScoreMap, k: usize) -> Vec<RankedScore> {
    scores
        .ranking()
        .into_iter()
        .take(k)
        .map(|u| RankedScore {
            node: scores.name(u).to_string(),
            score: scores.scores[u],
        })
        .collect()
}

/// Power-iteration PageRank over the undirected graph, every edge acting as
/// two opposite arcs. Transitions are uniform over neighbors unless the
/// topology asks for weighted transitions. Mass sitting on isolated nodes is
/// spread uniformly, so the scores always sum to one.
pub fn pagerank<T: Topology + ?Sized>(g: &T, cfg: &PageRankConfig) -> Result<ScoreMap> {
    cfg.validate()?;
    let n = g.node_count();
    if n == 0 {
        return Err(Error::domain("pagerank of an empty graph"));
    }
    let weighted = g.weighted_transitions();
    // out-strength: degree, or summed weight for weighted transitions
    let strength: Vec<f64> = (0..n)
        .map(|u| {
            let adj = g.adjacency(u);
            if weighted {
                adj.iter().map(|&(_, w)| w).sum()
            } else {
                adj.len() as f64
            }
        })
        .collect();

    let nf = n as f64;
    let d = cfg.damping;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for _ in 0..cfg.max_iterations {
        let dangling: f64 = (0..n).filter(|&u| strength[u] == 0.0).map(|u| rank[u]).sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        for (u, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = g
                .adjacency(u)
                .iter()
                .map(|&(v, w)| {
                    let share = if weighted { w } else { 1.0 };
                    rank[v] * share / strength[v]
                })
                .sum();
            *slot = base + d * inflow;
        }
        let delta: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if delta <= cfg.tolerance {
            break;
        }
    }
    Ok(ScoreMap::from_topology(g, rank))
}

/// Raw betweenness on unweighted shortest paths (Brandes). Each unordered
/// pair `{s, t}` contributes once; endpoints get nothing.
pub fn betweenness<T: Topology + ?Sized>(g: &T) -> ScoreMap {
    let n = g.node_count();
    let mut centrality = vec![0.0; n];

    let mut stack = Vec::with_capacity(n);
    let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0f64; n];
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        stack.clear();
        for u in 0..n {
            preds[u].clear();
            sigma[u] = 0.0;
            dist[u] = -1;
            delta[u] = 0.0;
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);

        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &(w, _) in g.adjacency(v) {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }

        while let Some(w) = stack.pop() {
            let coeff = (1.0 + delta[w]) / sigma[w];
            for &v in &preds[w] {
                delta[v] += sigma[v] * coeff;
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }

    for c in &mut centrality {
        *c /= 2.0;
    }
    ScoreMap::from_topology(g, centrality)
}

/// Betweenness divided by the number of pairs not involving the node,
/// `(N-1)(N-2)/2`. Graphs with fewer than three nodes score zero.
pub fn betweenness_normalized<T: Topology + ?Sized>(g: &T) -> ScoreMap {
    let mut raw = betweenness(g);
    let n = g.node_count() as f64;
    let pairs = (n - 1.0) * (n - 2.0) / 2.0;
    for s in &mut raw.scores {
        *s = if pairs > 0.0 { *s / pairs } else { 0.0 };
    }
    raw
}
