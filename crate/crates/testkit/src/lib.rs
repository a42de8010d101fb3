//! Slow, direct reference implementations used as test oracles.
//!
//! Everything here works on plain edge lists (`n` nodes, `(u, v[, w])`
//! tuples) and shares no code with the library under test.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Edge = (usize, usize);
pub type WEdge = (usize, usize, f64);

/// Random simple undirected graph where each pair is kept with probability
/// `p`. Independent of the library's generators.
pub fn random_edges(n: usize, p: f64, rng: &mut impl Rng) -> Vec<Edge> {
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                out.push((u, v));
            }
        }
    }
    out
}

pub fn adjacency_matrix(n: usize, edges: &[Edge]) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in edges {
        if u != v {
            a[u][v] = true;
            a[v][u] = true;
        }
    }
    a
}

/// PageRank by repeated multiplication with the dense column-stochastic
/// transition matrix; columns of isolated nodes are uniform.
pub fn dense_pagerank(n: usize, edges: &[Edge], damping: f64, iterations: usize) -> Vec<f64> {
    let a = adjacency_matrix(n, edges);
    let deg: Vec<usize> = a.iter().map(|row| row.iter().filter(|&&x| x).count()).collect();
    let mut m = vec![vec![0.0; n]; n];
    for (v, &dv) in deg.iter().enumerate() {
        for (u, row) in m.iter_mut().enumerate() {
            row[v] = if dv == 0 {
                1.0 / n as f64
            } else if a[u][v] {
                1.0 / dv as f64
            } else {
                0.0
            };
        }
    }
    let mut r = vec![1.0 / n as f64; n];
    for _ in 0..iterations {
        r = (0..n)
            .map(|u| (1.0 - damping) / n as f64 + damping * (0..n).map(|v| m[u][v] * r[v]).sum::<f64>())
            .collect();
    }
    r
}

/// Hop distances by Floyd–Warshall; `None` for unreachable pairs.
#[allow(clippy::needless_range_loop)]
pub fn all_pairs_hops(n: usize, edges: &[Edge]) -> Vec<Vec<Option<usize>>> {
    let mut d = vec![vec![None; n]; n];
    for (u, row) in d.iter_mut().enumerate() {
        row[u] = Some(0);
    }
    for &(u, v) in edges {
        if u != v {
            d[u][v] = Some(1);
            d[v][u] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(dik) = d[i][k] else { continue };
            for j in 0..n {
                if let Some(dkj) = d[k][j] {
                    if d[i][j].is_none_or(|dij| dik + dkj < dij) {
                        d[i][j] = Some(dik + dkj);
                    }
                }
            }
        }
    }
    d
}

/// Number of shortest paths between every pair, built up layer by layer
/// from the distance matrix.
pub fn shortest_path_counts(n: usize, edges: &[Edge]) -> (Vec<Vec<Option<usize>>>, Vec<Vec<f64>>) {
    let a = adjacency_matrix(n, edges);
    let d = all_pairs_hops(n, edges);
    let mut sigma = vec![vec![0.0; n]; n];
    for s in 0..n {
        let mut by_dist: Vec<usize> = (0..n).filter(|&t| d[s][t].is_some()).collect();
        by_dist.sort_by_key(|&t| d[s][t]);
        for t in by_dist {
            if t == s {
                sigma[s][t] = 1.0;
                continue;
            }
            let dt = d[s][t].unwrap();
            sigma[s][t] = (0..n)
                .filter(|&w| a[w][t] && d[s][w] == Some(dt - 1))
                .map(|w| sigma[s][w])
                .sum();
        }
    }
    (d, sigma)
}

/// Betweenness from the definition: for each unordered pair `{s, t}` and
/// each other node `v` on a shortest path, add `σ_sv σ_vt / σ_st`.
pub fn brute_betweenness(n: usize, edges: &[Edge]) -> Vec<f64> {
    let (d, sigma) = shortest_path_counts(n, edges);
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let Some(dst) = d[s][t] else { continue };
            for (v, score) in bc.iter_mut().enumerate() {
                if v == s || v == t {
                    continue;
                }
                if let (Some(a), Some(b)) = (d[s][v], d[v][t]) {
                    if a + b == dst {
                        *score += sigma[s][v] * sigma[v][t] / sigma[s][t];
                    }
                }
            }
        }
    }
    bc
}

/// Kruskal over all edges with union–find, then the weight of the tree
/// containing `start`.
pub fn kruskal_component_weight(n: usize, edges: &[WEdge], start: usize) -> f64 {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut sorted = edges.to_vec();
    sorted.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap());
    let mut chosen = Vec::new();
    for (u, v, w) in sorted {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            chosen.push((u, w));
        }
    }
    let root = find(&mut parent, start);
    chosen
        .into_iter()
        .filter(|&(u, _)| find(&mut parent, u) == root)
        .map(|(_, w)| w)
        .sum()
}

/// Triangles through each node by checking every triple.
pub fn brute_triangles(n: usize, edges: &[Edge]) -> Vec<usize> {
    let a = adjacency_matrix(n, edges);
    let mut t = vec![0; n];
    for i in 0..n {
        for j in i + 1..n {
            if !a[i][j] {
                continue;
            }
            for k in j + 1..n {
                if a[i][k] && a[j][k] {
                    t[i] += 1;
                    t[j] += 1;
                    t[k] += 1;
                }
            }
        }
    }
    t
}

/// Fraction of connected neighbour pairs, by enumerating neighbour pairs.
pub fn brute_clustering(n: usize, edges: &[Edge]) -> Vec<f64> {
    let a = adjacency_matrix(n, edges);
    (0..n)
        .map(|u| {
            let nbrs: Vec<usize> = (0..n).filter(|&v| a[u][v]).collect();
            if nbrs.len() < 2 {
                return 0.0;
            }
            let mut linked = 0;
            let mut pairs = 0;
            for i in 0..nbrs.len() {
                for j in i + 1..nbrs.len() {
                    pairs += 1;
                    if a[nbrs[i]][nbrs[j]] {
                        linked += 1;
                    }
                }
            }
            linked as f64 / pairs as f64
        })
        .collect()
}

/// AUC as the share of concordant positive/negative pairs, ties counted as
/// one half.
pub fn brute_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut total = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        if !li {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj {
                continue;
            }
            total += 1.0;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    wins / total
}

/// Modularity by the double sum over all node pairs:
/// `1/2m Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)`.
pub fn naive_modularity(n: usize, edges: &[WEdge], labels: &[usize]) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    for &(u, v, w) in edges {
        a[u][v] = w;
        a[v][u] = w;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Exhaustive best single split over every feature and every threshold
/// halfway between consecutive distinct values. Returns `(feature,
/// threshold, weighted child Gini)`; ties prefer the lower feature, then the
/// lower threshold.
pub fn best_split(features: &[Vec<f64>], labels: &[bool]) -> Option<(usize, f64, f64)> {
    let n = features.len() as f64;
    let gini = |rows: &[usize]| {
        if rows.is_empty() {
            return 0.0;
        }
        let p = rows.iter().filter(|&&r| labels[r]).count() as f64 / rows.len() as f64;
        1.0 - p * p - (1.0 - p) * (1.0 - p)
    };
    let mut best: Option<(usize, f64, f64)> = None;
    for f in 0..features[0].len() {
        let values: BTreeSet<u64> = features.iter().map(|r| r[f].to_bits()).collect();
        let mut values: Vec<f64> = values.into_iter().map(f64::from_bits).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in values.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let (left, right): (Vec<usize>, Vec<usize>) = (0..features.len()).partition(|&r| features[r][f] <= t);
            let imp = (left.len() as f64 * gini(&left) + right.len() as f64 * gini(&right)) / n;
            if best.is_none_or(|(_, _, b)| imp < b - 1e-12) {
                best = Some((f, t, imp));
            }
        }
    }
    best
}

/// Majority-vote label dynamics written independently of the library, but
/// following the same random protocol: ChaCha8 seeded with `seed`; each
/// sweep shuffles `0..n`; a node keeps its label when that label is among
/// the most frequent neighbour labels, otherwise it takes the
/// `gen_range(0..k)`-th of the `k` modal labels in ascending order. Stops
/// after a quiet sweep or `max_sweeps`.
pub fn majority_vote_labels(n: usize, edges: &[Edge], seed: u64, max_sweeps: usize) -> Vec<usize> {
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        nbrs[u].push(v);
        nbrs[v].push(u);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut label: Vec<usize> = (0..n).collect();
    for _ in 0..max_sweeps {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut quiet = true;
        for u in order {
            if nbrs[u].is_empty() {
                continue;
            }
            let mut tally: BTreeMap<usize, usize> = BTreeMap::new();
            for &v in &nbrs[u] {
                *tally.entry(label[v]).or_default() += 1;
            }
            let top = *tally.values().max().unwrap();
            let modal: Vec<usize> = tally.iter().filter(|(_, &c)| c == top).map(|(&l, _)| l).collect();
            if modal.contains(&label[u]) {
                continue;
            }
            label[u] = modal[rng.gen_range(0..modal.len())];
            quiet = false;
        }
        if quiet {
            break;
        }
    }
    label
}

/// Relabels to `0..k` in order of first appearance.
pub fn canonical(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Connected-component id per node, by repeated flooding over the edge list.
pub fn components(n: usize, edges: &[Edge]) -> Vec<usize> {
    let mut comp: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for &(u, v) in edges {
            let m = comp[u].min(comp[v]);
            if comp[u] != m || comp[v] != m {
                comp[u] = m;
                comp[v] = m;
                changed = true;
            }
        }
        if !changed {
            return comp;
        }
    }
}
