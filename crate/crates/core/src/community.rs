//! Community detection: asynchronous label propagation, Louvain modularity
//! optimisation, and the modularity score itself.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graph::{NodeId, Topology};
use crate::{Error, Result};

/// Gains smaller than this are treated as no improvement.
const GAIN_EPSILON: f64 = 1e-12;

/// Per-node community labels, canonicalised to `0..community_count` in order
/// of first appearance by node id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommunityAssignment {
    labels: Vec<usize>,
    community_count: usize,
}

impl CommunityAssignment {
    /// Canonicalises arbitrary raw labels.
    pub fn from_raw(raw: &[usize]) -> Self {
        let mut remap: HashMap<usize, usize> = HashMap::new();
        let labels: Vec<usize> = raw
            .iter()
            .map(|&l| {
                let next = remap.len();
                *remap.entry(l).or_insert(next)
            })
            .collect();
        Self {
            community_count: remap.len(),
            labels,
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
            community_count: n,
        }
    }

    pub fn all_in_one(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            community_count: usize::from(n > 0),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, u: NodeId) -> usize {
        self.labels[u]
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn same(&self, u: NodeId, v: NodeId) -> bool {
        self.labels[u] == self.labels[v]
    }

    /// Node names grouped by community, communities in label order, members in
    /// id order.
    pub fn members<T: Topology + ?Sized>(&self, g: &T) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); self.community_count];
        for (u, &l) in self.labels.iter().enumerate() {
            out[l].push(g.name(u).to_string());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LpConfig {
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for LpConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpRun {
    pub assignment: CommunityAssignment,
    /// Sweeps performed, including the final sweep that changed nothing.
    pub sweeps: usize,
    pub converged: bool,
}

pub fn label_propagation<T: Topology + ?Sized>(g: &T, cfg: &LpConfig) -> CommunityAssignment {
    label_propagation_run(g, cfg).assignment
}

/// Asynchronous label propagation.
///
/// Every node starts in its own community. Each sweep visits the nodes in the
/// order `0..n` shuffled by a ChaCha8 stream seeded with `cfg.seed`. A node
/// whose label is already among its neighbours' most frequent labels keeps
/// it; otherwise it adopts one of the modal labels, sorted ascending and
/// picked with `gen_range(0..count)` from the same stream. Isolated nodes
/// never change. The run stops after a sweep without changes or after
/// `cfg.max_iterations` sweeps.
pub fn label_propagation_run<T: Topology + ?Sized>(g: &T, cfg: &LpConfig) -> LpRun {
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut labels: Vec<usize> = (0..n).collect();
    let mut order: Vec<NodeId> = (0..n).collect();
    let mut counts = vec![0usize; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut modal: Vec<usize> = Vec::new();

    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < cfg.max_iterations {
        sweeps += 1;
        order.clear();
        order.extend(0..n);
        order.shuffle(&mut rng);
        let mut changed = false;
        for &u in &order {
            let adj = g.adjacency(u);
            if adj.is_empty() {
                continue;
            }
            for &(v, _) in adj {
                let l = labels[v];
                if counts[l] == 0 {
                    touched.push(l);
                }
                counts[l] += 1;
            }
            let best = touched.iter().map(|&l| counts[l]).max().unwrap_or(0);
            modal.clear();
            modal.extend(touched.iter().copied().filter(|&l| counts[l] == best));
            for &l in &touched {
                counts[l] = 0;
            }
            touched.clear();

            if modal.contains(&labels[u]) {
                continue;
            }
            modal.sort_unstable();
            labels[u] = modal[rng.gen_range(0..modal.len())];
            changed = true;
        }
        if !changed {
            converged = true;
            break;
        }
    }

    LpRun {
        assignment: CommunityAssignment::from_raw(&labels),
        sweeps,
        converged,
    }
}

/// Weighted Newman modularity at resolution 1.
pub fn modularity<T: Topology + ?Sized>(g: &T, a: &CommunityAssignment) -> Result<f64> {
    let n = g.node_count();
    if a.len() != n {
        return Err(Error::domain(format!(
            "assignment covers {} nodes, graph has {n}",
            a.len()
        )));
    }
    if g.edge_count() == 0 {
        return Err(Error::domain("modularity is undefined on an edgeless graph"));
    }
    let mut inner = vec![0.0; a.community_count()];
    let mut total = vec![0.0; a.community_count()];
    for u in 0..n {
        let cu = a.label(u);
        for &(v, w) in g.adjacency(u) {
            total[cu] += w;
            if a.label(v) == cu {
                inner[cu] += w;
            }
        }
    }
    // summed in the same order as `total`, so a single community scores exactly 0
    let two_m: f64 = total.iter().sum();
    Ok(inner
        .iter()
        .zip(&total)
        .map(|(&i, &t)| i / two_m - (t / two_m).powi(2))
        .sum())
}

/// Louvain modularity maximisation: local moves in a seeded node order until
/// no move improves modularity, then aggregation of communities into nodes,
/// repeated until a level makes no move. Returns the final level's partition.
pub fn louvain<T: Topology + ?Sized>(g: &T, seed: u64) -> Result<CommunityAssignment> {
    if g.edge_count() == 0 {
        return Err(Error::domain("louvain needs at least one edge"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = Level::from_topology(g);
    // community of every original node, in terms of the current level's nodes
    let mut membership: Vec<usize> = (0..g.node_count()).collect();

    loop {
        let (community, moved) = level.local_moves(&mut rng);
        if !moved {
            break;
        }
        let (next, renumber) = level.aggregate(&community);
        for m in &mut membership {
            *m = renumber[community[*m]];
        }
        level = next;
    }
    Ok(CommunityAssignment::from_raw(&membership))
}

/// One level of the Louvain hierarchy: a weighted graph with self-loops.
struct Level {
    adjacency: Vec<Vec<(usize, f64)>>,
    /// Weighted degree, self-loops counted twice.
    strength: Vec<f64>,
    self_loops: Vec<f64>,
    two_m: f64,
}

impl Level {
    fn from_topology<T: Topology + ?Sized>(g: &T) -> Self {
        let n = g.node_count();
        let adjacency: Vec<Vec<(usize, f64)>> = (0..n).map(|u| g.adjacency(u).to_vec()).collect();
        let strength: Vec<f64> = adjacency.iter().map(|row| row.iter().map(|&(_, w)| w).sum()).collect();
        let two_m = strength.iter().sum();
        Self {
            adjacency,
            strength,
            self_loops: vec![0.0; n],
            two_m,
        }
    }

    fn len(&self) -> usize {
        self.adjacency.len()
    }

    /// Returns each node's community and whether any node moved.
    fn local_moves(&self, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut community: Vec<usize> = (0..n).collect();
        let mut tot = self.strength.clone();
        let mut link = vec![0.0f64; n];
        let mut seen: Vec<usize> = Vec::new();
        let mut is_seen = vec![false; n];
        let mut order: Vec<usize> = (0..n).collect();
        let mut moved_any = false;

        loop {
            order.shuffle(rng);
            let mut moved = false;
            for &u in &order {
                let ku = self.strength[u];
                let home = community[u];
                for &(v, w) in &self.adjacency[u] {
                    let c = community[v];
                    if !is_seen[c] {
                        is_seen[c] = true;
                        seen.push(c);
                    }
                    link[c] += w;
                }
                tot[home] -= ku;

                let gain = |c: usize, link_c: f64| link_c - tot[c] * ku / self.two_m;
                let mut best = home;
                let mut best_gain = gain(home, link[home]);
                for &c in &seen {
                    let g = gain(c, link[c]);
                    if g > best_gain + GAIN_EPSILON {
                        best = c;
                        best_gain = g;
                    }
                }
                for &c in &seen {
                    link[c] = 0.0;
                    is_seen[c] = false;
                }
                link[home] = 0.0;
                seen.clear();

                tot[best] += ku;
                if best != home {
                    community[u] = best;
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                break;
            }
        }
        (community, moved_any)
    }

    /// Collapses communities into nodes. Returns the new level and the map
    /// from old community ids to new node ids.
    fn aggregate(&self, community: &[usize]) -> (Level, Vec<usize>) {
        let mut renumber = vec![usize::MAX; self.len()];
        let mut count = 0;
        for &c in community {
            if renumber[c] == usize::MAX {
                renumber[c] = count;
                count += 1;
            }
        }
        let mut self_loops = vec![0.0; count];
        let mut strength = vec![0.0; count];
        let mut weights: Vec<HashMap<usize, f64>> = vec![HashMap::new(); count];
        for u in 0..self.len() {
            let cu = renumber[community[u]];
            strength[cu] += self.strength[u];
            self_loops[cu] += self.self_loops[u];
            for &(v, w) in &self.adjacency[u] {
                let cv = renumber[community[v]];
                if cu == cv {
                    // each internal edge is seen from both ends
                    self_loops[cu] += w / 2.0;
                } else {
                    *weights[cu].entry(cv).or_insert(0.0) += w;
                }
            }
        }
        let adjacency = weights
            .into_iter()
            .map(|m| {
                let mut row: Vec<(usize, f64)> = m.into_iter().collect();
                row.sort_unstable_by_key(|&(v, _)| v);
                row
            })
            .collect();
        let level = Level {
            adjacency,
            strength,
            self_loops,
            two_m: self.two_m,
        };
        (level, renumber)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Graph;

    fn unit(edges: &[(&str, &str)]) -> Graph {
        Graph::from_edge_list(edges.iter().map(|&(a, b)| (a, b, 1.0))).unwrap()
    }

    fn two_triangles() -> Graph {
        unit(&[("a", "b"), ("b", "c"), ("c", "a"), ("x", "y"), ("y", "z"), ("z", "x")])
    }

    #[test]
    fn canonical_labels() {
        let a = CommunityAssignment::from_raw(&[7, 3, 7, 9, 3]);
        assert_eq!(a.labels(), &[0, 1, 0, 2, 1]);
        assert_eq!(a.community_count(), 3);
    }

    #[test]
    fn lp_isolated_node() {
        let (g, _) = Graph::from_edge_list_with_summary([("a", "a", 1.0)]).unwrap();
        let run = label_propagation_run(&g, &LpConfig::default());
        assert_eq!(run.assignment.community_count(), 1);
        assert!(run.converged);
    }

    #[test]
    fn lp_two_triangles() {
        let g = two_triangles();
        for seed in 0..10 {
            let a = label_propagation(
                &g,
                &LpConfig {
                    seed,
                    ..Default::default()
                },
            );
            assert_eq!(a.community_count(), 2);
            assert_eq!(a.labels(), &[0, 0, 0, 1, 1, 1]);
        }
    }

    #[test]
    fn lp_respects_iteration_bound() {
        let g = two_triangles();
        let run = label_propagation_run(
            &g,
            &LpConfig {
                max_iterations: 1,
                seed: 3,
            },
        );
        assert_eq!(run.sweeps, 1);
        assert!(!run.converged);
    }

    #[test]
    fn modularity_values() {
        let g = two_triangles();
        let split = CommunityAssignment::from_raw(&[0, 0, 0, 1, 1, 1]);
        assert!((modularity(&g, &split).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(modularity(&g, &CommunityAssignment::all_in_one(6)).unwrap(), 0.0);

        let (edgeless, _) = Graph::from_edge_list_with_summary([("a", "a", 1.0)]).unwrap();
        assert!(modularity(&edgeless, &CommunityAssignment::all_in_one(1)).is_err());
        assert!(modularity(&g, &CommunityAssignment::all_in_one(2)).is_err());
    }

    #[test]
    fn louvain_small_cases() {
        let g = two_triangles();
        assert_eq!(louvain(&g, 1).unwrap().labels(), &[0, 0, 0, 1, 1, 1]);

        let tri = unit(&[("a", "b"), ("b", "c"), ("c", "a")]);
        assert_eq!(louvain(&tri, 1).unwrap().community_count(), 1);

        let (edgeless, _) = Graph::from_edge_list_with_summary([("a", "a", 1.0)]).unwrap();
        assert!(louvain(&edgeless, 0).is_err());
    }

    #[test]
    fn members_grouped_by_label() {
        let g = two_triangles();
        let a = louvain(&g, 0).unwrap();
        assert_eq!(a.members(&g), vec![vec!["a", "b", "c"], vec!["x", "y", "z"]]);
    }
}
