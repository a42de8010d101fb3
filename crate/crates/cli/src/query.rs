//! The four question presets, each a fixed composition of library calls.

use std::fmt::Write as _;

use anyhow::{Context, Result};
use clap::ValueEnum;
use graphsci_core::centrality::RankedScore;
use graphsci_core::{
    betweenness, bfs, label_propagation, louvain, pagerank, prim_mst, top_k, BfsResult, BfsTermination,
    CommunityAssignment, Graph, LpConfig, PageRankConfig, ScoreMap, SpanningTree, Termination, Topology,
};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum QueryPreset {
    /// Influence of the houses: PageRank and betweenness, top k
    Q1,
    /// Most popular characters: PageRank and betweenness, top k
    Q2,
    /// Houses as communities: label propagation and Louvain
    Q3,
    /// Leading characters: bounded BFS and Prim MST from the top PageRank node
    Q4,
}

#[derive(Debug, Clone, Copy)]
pub struct QueryParams {
    pub k: Option<usize>,
    pub seed: u64,
    pub max_depth: usize,
}

#[derive(Debug, Serialize)]
pub struct CentralityResult {
    pub algorithm: &'static str,
    pub config: serde_json::Value,
    pub scores: Vec<RankedScore>,
}

#[derive(Debug, Serialize)]
pub struct CommunityResult {
    pub algorithm: &'static str,
    pub seed: u64,
    pub community_count: usize,
    pub members: Vec<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct BfsOutput {
    pub start: String,
    pub order: Vec<String>,
    pub depths: Vec<usize>,
    pub terminated_by: Termination,
}

#[derive(Debug, Serialize)]
pub struct MstOutput {
    pub start: String,
    pub edges: Vec<(String, String, f64)>,
    pub total_weight: f64,
}

#[derive(Debug, Serialize)]
pub struct LeadingCharacter {
    pub node: String,
    pub mst_degree: usize,
    pub depth: usize,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum QueryAnswer {
    Centrality {
        query: QueryPreset,
        k: usize,
        results: Vec<CentralityResult>,
    },
    Communities {
        query: QueryPreset,
        results: Vec<CommunityResult>,
    },
    Leading {
        query: QueryPreset,
        k: usize,
        leading: Vec<LeadingCharacter>,
        bfs: BfsOutput,
        mst: MstOutput,
    },
}

pub fn centrality_result(
    algorithm: &'static str,
    config: serde_json::Value,
    scores: &ScoreMap,
    k: usize,
) -> CentralityResult {
    CentralityResult {
        algorithm,
        config,
        scores: top_k(scores, k),
    }
}

pub fn community_result(g: &Graph, algorithm: &'static str, seed: u64, a: &CommunityAssignment) -> CommunityResult {
    CommunityResult {
        algorithm,
        seed,
        community_count: a.community_count(),
        members: a.members(g),
    }
}

pub fn bfs_output(g: &Graph, start: usize, r: &BfsResult) -> BfsOutput {
    BfsOutput {
        start: g.name(start).to_string(),
        order: r.order.iter().map(|&u| g.name(u).to_string()).collect(),
        depths: r.depths.clone(),
        terminated_by: r.terminated_by,
    }
}

pub fn mst_output(g: &Graph, t: &SpanningTree) -> MstOutput {
    MstOutput {
        start: g.name(t.start).to_string(),
        edges: t
            .edges
            .iter()
            .map(|&(u, v, w)| (g.name(u).to_string(), g.name(v).to_string(), w))
            .collect(),
        total_weight: t.total_weight,
    }
}

pub fn run(g: &Graph, preset: QueryPreset, params: QueryParams) -> Result<QueryAnswer> {
    anyhow::ensure!(g.node_count() > 0, "the graph has no nodes");
    let pr_cfg = PageRankConfig::default();
    match preset {
        QueryPreset::Q1 | QueryPreset::Q2 => {
            let k = params.k.unwrap_or(1);
            let pr = pagerank(g, &pr_cfg)?;
            let bc = betweenness(g);
            Ok(QueryAnswer::Centrality {
                query: preset,
                k,
                results: vec![
                    centrality_result("pagerank", serde_json::to_value(pr_cfg)?, &pr, k),
                    centrality_result("betweenness", serde_json::json!({ "normalized": false }), &bc, k),
                ],
            })
        }
        QueryPreset::Q3 => {
            let lp = label_propagation(
                g,
                &LpConfig {
                    seed: params.seed,
                    ..LpConfig::default()
                },
            );
            let lv = louvain(g, params.seed)?;
            Ok(QueryAnswer::Communities {
                query: preset,
                results: vec![
                    community_result(g, "label_propagation", params.seed, &lp),
                    community_result(g, "louvain", params.seed, &lv),
                ],
            })
        }
        QueryPreset::Q4 => {
            let k = params.k.unwrap_or(10);
            let pr = pagerank(g, &pr_cfg)?;
            let start = *pr.ranking().first().context("the graph has no nodes")?;
            let reach = bfs(g, start, &BfsTermination::depth(params.max_depth))?;
            let tree = prim_mst(g, start)?;
            Ok(QueryAnswer::Leading {
                query: preset,
                k,
                leading: leading_characters(g, &reach, &tree, k),
                bfs: bfs_output(g, start, &reach),
                mst: mst_output(g, &tree),
            })
        }
    }
}

/// Nodes reached by the bounded BFS, ranked by how many MST edges touch them
/// (descending), then by BFS depth, then by name.
pub fn leading_characters(g: &Graph, reach: &BfsResult, tree: &SpanningTree, k: usize) -> Vec<LeadingCharacter> {
    let mut mst_degree = vec![0usize; g.node_count()];
    for &(u, v, _) in &tree.edges {
        mst_degree[u] += 1;
        mst_degree[v] += 1;
    }
    let mut rows: Vec<LeadingCharacter> = reach
        .order
        .iter()
        .zip(&reach.depths)
        .map(|(&u, &depth)| LeadingCharacter {
            node: g.name(u).to_string(),
            mst_degree: mst_degree[u],
            depth,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.mst_degree
            .cmp(&a.mst_degree)
            .then(a.depth.cmp(&b.depth))
            .then_with(|| a.node.cmp(&b.node))
    });
    rows.truncate(k);
    rows
}

pub fn render_table(answer: &QueryAnswer) -> String {
    let mut out = String::new();
    match answer {
        QueryAnswer::Centrality { query, k, results } => {
            let _ = writeln!(out, "{query:?}: top {k} by centrality");
            for r in results {
                let _ = writeln!(out, "\n{}", r.algorithm);
                let _ = writeln!(out, "{:<6} {:<32} {:>14}", "rank", "node", "score");
                for (i, s) in r.scores.iter().enumerate() {
                    let _ = writeln!(out, "{:<6} {:<32} {:>14.6}", i + 1, s.node, s.score);
                }
            }
        }
        QueryAnswer::Communities { query, results } => {
            let _ = writeln!(out, "{query:?}: communities");
            for r in results {
                let _ = writeln!(
                    out,
                    "\n{} (seed {}): {} communities",
                    r.algorithm, r.seed, r.community_count
                );
                for (i, m) in r.members.iter().enumerate() {
                    let shown: Vec<&str> = m.iter().take(8).map(String::as_str).collect();
                    let more = if m.len() > 8 {
                        format!(", ... (+{})", m.len() - 8)
                    } else {
                        String::new()
                    };
                    let _ = writeln!(out, "  {:>4} [{:>4}] {}{}", i, m.len(), shown.join(", "), more);
                }
            }
        }
        QueryAnswer::Leading {
            query,
            k,
            leading,
            bfs,
            mst,
        } => {
            let _ = writeln!(out, "{query:?}: leading characters from {}", bfs.start);
            let _ = writeln!(
                out,
                "bfs reached {} nodes ({:?}); mst has {} edges, total weight {}",
                bfs.order.len(),
                bfs.terminated_by,
                mst.edges.len(),
                mst.total_weight
            );
            let _ = writeln!(out, "\ntop {k}");
            let _ = writeln!(out, "{:<6} {:<32} {:>10} {:>6}", "rank", "node", "mst_degree", "depth");
            for (i, l) in leading.iter().enumerate() {
                let _ = writeln!(out, "{:<6} {:<32} {:>10} {:>6}", i + 1, l.node, l.mst_degree, l.depth);
            }
        }
    }
    out
}
