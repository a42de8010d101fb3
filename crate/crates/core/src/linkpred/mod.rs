//! Link prediction: edge split with balanced negatives, pair features computed
//! on the training graph only, a random forest, and held-out assessment.

mod eval;
mod forest;

use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use eval::{auc, evaluate, render_table, Confusion, EvalReport, FeatureImportance};
pub use forest::{
    predict, train_forest, tree_seed, DecisionTree, FeatureSampling, ForestConfig, ForestModel, TreeNode,
};

use crate::community::{label_propagation, louvain, LpConfig};
use crate::graph::{Graph, NodeId, Topology};
use crate::metrics::{pair_features, Feature, PairMetricRow};
use crate::{Error, Result};

/// Below this many edges a split is refused.
pub const MIN_SPLIT_EDGES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Train,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LabeledPair {
    pub u: NodeId,
    pub v: NodeId,
    pub positive: bool,
}

/// Positives first, then the same number of negatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPairSet {
    pub role: Role,
    pub pairs: Vec<LabeledPair>,
}

impl LabeledPairSet {
    fn new(role: Role, positives: &[(NodeId, NodeId)], negatives: &[(NodeId, NodeId)]) -> Self {
        let pairs = positives
            .iter()
            .map(|&(u, v)| LabeledPair { u, v, positive: true })
            .chain(negatives.iter().map(|&(u, v)| LabeledPair { u, v, positive: false }))
            .collect();
        Self { role, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn positives(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.pairs.iter().filter(|p| p.positive).map(|p| (p.u, p.v))
    }

    pub fn negatives(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.pairs.iter().filter(|p| !p.positive).map(|p| (p.u, p.v))
    }

    pub fn node_pairs(&self) -> Vec<(NodeId, NodeId)> {
        self.pairs.iter().map(|p| (p.u, p.v)).collect()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.pairs.iter().map(|p| p.positive).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            train_fraction: 0.6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EdgeSplit {
    /// Same nodes as the source graph, train-positive edges only.
    pub train_graph: Graph,
    pub train: LabeledPairSet,
    pub test: LabeledPairSet,
}

/// Shuffles the edges with `cfg.seed`, assigns the first
/// `round(train_fraction * m)` to training and the rest to testing, and draws
/// one negative per positive in each role. Test negatives never repeat a
/// training negative.
pub fn split_edges(g: &Graph, cfg: &SplitConfig) -> Result<EdgeSplit> {
    if !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
        return Err(Error::domain(format!(
            "train_fraction must be in (0, 1), got {}",
            cfg.train_fraction
        )));
    }
    let m = g.edge_count();
    if m < MIN_SPLIT_EDGES {
        return Err(Error::domain(format!(
            "splitting needs at least {MIN_SPLIT_EDGES} edges, graph has {m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut edges = g.edge_list();
    edges.shuffle(&mut rng);
    let n_train = ((cfg.train_fraction * m as f64).round() as usize).clamp(1, m - 1);
    let (train_edges, test_edges) = edges.split_at(n_train);
    let train_pos: Vec<(NodeId, NodeId)> = train_edges.iter().map(|&(u, v, _)| (u, v)).collect();
    let test_pos: Vec<(NodeId, NodeId)> = test_edges.iter().map(|&(u, v, _)| (u, v)).collect();

    let train_neg = sample_negatives(g, train_pos.len(), rng.gen(), &HashSet::new())?;
    let exclude: HashSet<(NodeId, NodeId)> = train_neg.iter().copied().collect();
    let test_neg = sample_negatives(g, test_pos.len(), rng.gen(), &exclude)?;

    let train_graph = Graph::from_parts(g.names().to_vec(), train_edges.iter().copied())?;
    Ok(EdgeSplit {
        train_graph,
        train: LabeledPairSet::new(Role::Train, &train_pos, &train_neg),
        test: LabeledPairSet::new(Role::Test, &test_pos, &test_neg),
    })
}

/// Draws `count` distinct unordered non-adjacent pairs `(u, v)` with `u < v`
/// uniformly without replacement, skipping anything in `exclude` (in either
/// orientation).
pub fn sample_negatives(
    g: &Graph,
    count: usize,
    seed: u64,
    exclude: &HashSet<(NodeId, NodeId)>,
) -> Result<Vec<(NodeId, NodeId)>> {
    let n = g.node_count();
    let exclude: HashSet<(NodeId, NodeId)> = exclude
        .iter()
        .filter(|&&(u, v)| u != v && u < n && v < n)
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .filter(|&(u, v)| !g.has_edge(u, v))
        .collect();
    let all_pairs = n * n.saturating_sub(1) / 2;
    let available = all_pairs - g.edge_count() - exclude.len();
    if count > available {
        return Err(Error::domain(format!(
            "cannot sample {count} negative pairs, only {available} non-edges available"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let usable = |u: NodeId, v: NodeId| !g.has_edge(u, v) && !exclude.contains(&(u, v));

    if count.saturating_mul(2) <= available {
        let mut chosen = HashSet::with_capacity(count);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a == b {
                continue;
            }
            let (u, v) = (a.min(b), a.max(b));
            if usable(u, v) && chosen.insert((u, v)) {
                out.push((u, v));
            }
        }
        Ok(out)
    } else {
        let candidates: Vec<(NodeId, NodeId)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| usable(u, v))
            .collect();
        Ok(index::sample(&mut rng, candidates.len(), count)
            .into_iter()
            .map(|i| candidates[i])
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub name: String,
    pub features: Vec<Feature>,
    pub split: SplitConfig,
    pub forest: ForestConfig,
    /// Seed for both community detectors run on the training graph.
    pub community_seed: u64,
    pub threshold: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            name: "model".to_string(),
            features: Feature::ALL.to_vec(),
            split: SplitConfig::default(),
            forest: ForestConfig::default(),
            community_seed: 0,
            threshold: 0.5,
        }
    }
}

impl PipelineConfig {
    /// Common neighbours as the only feature.
    pub fn common_neighbors_only() -> Self {
        Self {
            name: "common-neighbors".to_string(),
            features: vec![Feature::CommonNeighbors],
            ..Self::default()
        }
    }

    /// All ten pair features.
    pub fn all_features() -> Self {
        Self {
            name: "all-features".to_string(),
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.split.seed = seed;
        self.forest.seed = seed;
        self.community_seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::domain("feature subset is empty"));
        }
        let unique: HashSet<Feature> = self.features.iter().copied().collect();
        if unique.len() != self.features.len() {
            return Err(Error::domain("feature subset lists a feature twice"));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::domain("threshold must be in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredPair {
    pub u: NodeId,
    pub v: NodeId,
    pub positive: bool,
    pub score: f64,
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub report: EvalReport,
    pub model: ForestModel,
    /// Test pairs in evaluation order with their predicted probability.
    pub predictions: Vec<ScoredPair>,
    pub train_rows: Vec<PairMetricRow>,
    pub test_rows: Vec<PairMetricRow>,
}

fn select(rows: &[PairMetricRow], features: &[Feature]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| r.select(features)).collect()
}

/// Split, detect communities on the training graph, build pair features on
/// the training graph for both roles, train, predict the test pairs and
/// assess them.
pub fn run_pipeline(g: &Graph, cfg: &PipelineConfig) -> Result<PipelineRun> {
    cfg.validate()?;
    let split = split_edges(g, &cfg.split)?;
    let train_graph = &split.train_graph;

    let louvain_a = louvain(train_graph, cfg.community_seed)?;
    let lp_a = label_propagation(
        train_graph,
        &LpConfig {
            seed: cfg.community_seed,
            ..LpConfig::default()
        },
    );

    let train_rows = pair_features(train_graph, &split.train.node_pairs(), &louvain_a, &lp_a)?;
    let test_rows = pair_features(train_graph, &split.test.node_pairs(), &louvain_a, &lp_a)?;

    let names: Vec<String> = cfg.features.iter().map(|f| f.name().to_string()).collect();
    let model = train_forest(&select(&train_rows, &cfg.features), &split.train.labels(), &cfg.forest)?
        .with_feature_names(names)?;

    let test_labels = split.test.labels();
    let scores = predict(&model, &select(&test_rows, &cfg.features))?;
    let mut report = evaluate(&scores, &test_labels, cfg.threshold)?;
    report.importances = model
        .feature_names()
        .iter()
        .zip(model.importances())
        .map(|(f, &importance)| FeatureImportance {
            feature: f.clone(),
            importance,
        })
        .collect();

    let predictions = split
        .test
        .pairs
        .iter()
        .zip(&scores)
        .map(|(p, &score)| ScoredPair {
            u: p.u,
            v: p.v,
            positive: p.positive,
            score,
        })
        .collect();

    Ok(PipelineRun {
        report,
        model,
        predictions,
        train_rows,
        test_rows,
    })
}
