//! Bagged CART classifiers with Gini splits.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSampling {
    /// `max(1, floor(sqrt(F)))` candidate features per node.
    Sqrt,
    All,
}

impl FeatureSampling {
    fn count(self, features: usize) -> usize {
        match self {
            FeatureSampling::Sqrt => ((features as f64).sqrt().floor() as usize).max(1),
            FeatureSampling::All => features,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub features_per_split: FeatureSampling,
    /// Train each tree on a bootstrap resample; otherwise on all rows.
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 8,
            min_samples_split: 2,
            features_per_split: FeatureSampling::Sqrt,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestConfig {
    fn validate(&self) -> Result<()> {
        if self.n_trees == 0 || self.max_depth == 0 || self.min_samples_split == 0 {
            return Err(Error::domain(
                "n_trees, max_depth and min_samples_split must be positive",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    /// Rows with `x[feature] <= threshold` go to `left`.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        probability: f64,
    },
}

/// A binary tree stored as an arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
}

impl DecisionTree {
    pub fn leaf(probability: f64) -> Self {
        Self {
            nodes: vec![TreeNode::Leaf { probability }],
        }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    /// Positive-class probability of the leaf `row` falls into.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { probability } => return probability,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    fn max_feature(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                TreeNode::Split { feature, .. } => Some(*feature),
                TreeNode::Leaf { .. } => None,
            })
            .max()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForestModel {
    trees: Vec<DecisionTree>,
    feature_names: Vec<String>,
    importances: Vec<f64>,
}

impl ForestModel {
    /// Assembles a model from prebuilt trees. Importances must be one
    /// non-negative value per feature.
    pub fn from_trees(trees: Vec<DecisionTree>, feature_names: Vec<String>, importances: Vec<f64>) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::domain("a forest needs at least one tree"));
        }
        if importances.len() != feature_names.len() || importances.iter().any(|&v| v.is_nan() || v < 0.0) {
            return Err(Error::domain("importances must be one non-negative value per feature"));
        }
        if trees
            .iter()
            .filter_map(DecisionTree::max_feature)
            .any(|f| f >= feature_names.len())
        {
            return Err(Error::domain("split on a feature index outside the feature list"));
        }
        Ok(Self {
            trees,
            feature_names,
            importances,
        })
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Mean impurity decrease per feature, normalised to sum to one. All zero
    /// when no tree made a single split.
    pub fn importances(&self) -> &[f64] {
        &self.importances
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.feature_names.len() {
            return Err(Error::domain(format!(
                "model has {} features, got {} names",
                self.feature_names.len(),
                names.len()
            )));
        }
        self.feature_names = names;
        Ok(self)
    }
}

/// Positive-class probability for each row: the mean of the trees' leaf
/// probabilities.
pub fn predict(model: &ForestModel, features: &[Vec<f64>]) -> Result<Vec<f64>> {
    let arity = model.n_features();
    if let Some((i, row)) = features.iter().enumerate().find(|(_, r)| r.len() != arity) {
        return Err(Error::domain(format!(
            "row {i} has {} features, model expects {arity}",
            row.len()
        )));
    }
    let k = model.trees.len() as f64;
    Ok(features
        .iter()
        .map(|row| model.trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / k)
        .collect())
}

/// Seed of tree `i`, derived from the forest seed so that results do not
/// depend on the order trees are trained in.
pub fn tree_seed(master: u64, i: usize) -> u64 {
    splitmix64(master ^ splitmix64(i as u64))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn train_forest(features: &[Vec<f64>], labels: &[bool], cfg: &ForestConfig) -> Result<ForestModel> {
    cfg.validate()?;
    let n = features.len();
    if n < 2 || labels.len() != n {
        return Err(Error::domain(format!(
            "need at least two rows with one label each, got {n} rows and {} labels",
            labels.len()
        )));
    }
    let arity = features[0].len();
    if arity == 0 {
        return Err(Error::domain("rows have no features"));
    }
    for (i, row) in features.iter().enumerate() {
        if row.len() != arity {
            return Err(Error::domain(format!(
                "row {i} has {} features, expected {arity}",
                row.len()
            )));
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain(format!("row {i} has a non-finite feature")));
        }
    }
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 || positives == n {
        return Err(Error::domain("training labels contain a single class"));
    }

    let trained: Vec<(DecisionTree, Vec<f64>)> = (0..cfg.n_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(tree_seed(cfg.seed, i));
            let rows: Vec<usize> = if cfg.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let mut builder = TreeBuilder {
                features,
                labels,
                cfg,
                rng,
                nodes: Vec::new(),
                decrease: vec![0.0; arity],
                total: rows.len() as f64,
            };
            builder.grow(rows, 0);
            (DecisionTree { nodes: builder.nodes }, builder.decrease)
        })
        .collect();

    let mut importances = vec![0.0; arity];
    let mut trees = Vec::with_capacity(trained.len());
    for (tree, decrease) in trained {
        let sum: f64 = decrease.iter().sum();
        if sum > 0.0 {
            for (acc, d) in importances.iter_mut().zip(&decrease) {
                *acc += d / sum;
            }
        }
        trees.push(tree);
    }
    let sum: f64 = importances.iter().sum();
    if sum > 0.0 {
        for v in &mut importances {
            *v /= sum;
        }
    }

    Ok(ForestModel {
        trees,
        feature_names: (0..arity).map(|i| format!("x{i}")).collect(),
        importances,
    })
}

fn gini(pos: f64, n: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    let p = pos / n;
    2.0 * p * (1.0 - p)
}

/// Best split of `rows` on one feature: `(weighted child impurity,
/// threshold)`. Thresholds are midpoints between consecutive distinct values;
/// ties keep the smallest threshold.
pub(crate) fn best_threshold(
    features: &[Vec<f64>],
    labels: &[bool],
    rows: &[usize],
    feature: usize,
) -> Option<(f64, f64)> {
    let mut sorted: Vec<(f64, bool)> = rows.iter().map(|&r| (features[r][feature], labels[r])).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = sorted.len() as f64;
    let total_pos = sorted.iter().filter(|s| s.1).count() as f64;

    let mut best: Option<(f64, f64)> = None;
    let mut left_pos = 0.0;
    for i in 0..sorted.len() - 1 {
        if sorted[i].1 {
            left_pos += 1.0;
        }
        let (a, b) = (sorted[i].0, sorted[i + 1].0);
        if a == b {
            continue;
        }
        let nl = (i + 1) as f64;
        let nr = n - nl;
        let impurity = (nl * gini(left_pos, nl) + nr * gini(total_pos - left_pos, nr)) / n;
        if best.is_none_or(|(b_imp, _)| impurity < b_imp) {
            let mid = a + (b - a) / 2.0;
            let threshold = if mid < b { mid } else { a };
            best = Some((impurity, threshold));
        }
    }
    best
}

struct TreeBuilder<'a> {
    features: &'a [Vec<f64>],
    labels: &'a [bool],
    cfg: &'a ForestConfig,
    rng: ChaCha8Rng,
    nodes: Vec<TreeNode>,
    decrease: Vec<f64>,
    total: f64,
}

impl TreeBuilder<'_> {
    /// Grows the subtree for `rows` and returns its node index.
    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let n = rows.len() as f64;
        let pos = rows.iter().filter(|&&r| self.labels[r]).count() as f64;
        let id = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { probability: pos / n });

        let impurity = gini(pos, n);
        if depth >= self.cfg.max_depth || rows.len() < self.cfg.min_samples_split || impurity == 0.0 {
            return id;
        }

        let arity = self.features[0].len();
        let k = self.cfg.features_per_split.count(arity);
        let mut candidates = index::sample(&mut self.rng, arity, k).into_vec();
        candidates.sort_unstable();

        let mut best: Option<(f64, usize, f64)> = None;
        for f in candidates {
            if let Some((imp, thr)) = best_threshold(self.features, self.labels, &rows, f) {
                if best.is_none_or(|(b, _, _)| imp < b) {
                    best = Some((imp, f, thr));
                }
            }
        }
        let Some((child_impurity, feature, threshold)) = best else {
            return id;
        };
        let gain = impurity - child_impurity;
        if gain <= 1e-15 {
            return id;
        }
        self.decrease[feature] += n / self.total * gain;

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.into_iter().partition(|&r| self.features[r][feature] <= threshold);
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        self.nodes[id] = TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_tree() -> ForestConfig {
        ForestConfig {
            n_trees: 1,
            bootstrap: false,
            features_per_split: FeatureSampling::All,
            ..Default::default()
        }
    }

    #[test]
    fn separable_feature_fits_training_set() {
        let xs = [0.1, 0.2, 0.3, 0.45, 0.55, 0.7, 0.8, 0.95];
        let features: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let labels: Vec<bool> = xs.iter().map(|&x| x > 0.5).collect();
        let model = train_forest(&features, &labels, &ForestConfig::default()).unwrap();
        let preds = predict(&model, &features).unwrap();
        let correct = preds.iter().zip(&labels).filter(|(&p, &l)| (p >= 0.5) == l).count();
        assert_eq!(correct, xs.len());
        assert_eq!(model.importances(), &[1.0]);
    }

    #[test]
    fn constant_feature_gets_no_importance() {
        let features: Vec<Vec<f64>> = (0..20).map(|i| vec![3.0, i as f64]).collect();
        let labels: Vec<bool> = (0..20).map(|i| i % 3 == 0).collect();
        let model = train_forest(&features, &labels, &ForestConfig::default()).unwrap();
        assert_eq!(model.importances()[0], 0.0);
        assert!((model.importances()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_single_class_and_bad_shapes() {
        let f = vec![vec![1.0], vec![2.0]];
        assert!(train_forest(&f, &[true, true], &ForestConfig::default()).is_err());
        assert!(train_forest(&f[..1], &[true], &ForestConfig::default()).is_err());
        assert!(train_forest(&[vec![1.0], vec![2.0, 3.0]], &[true, false], &ForestConfig::default()).is_err());
        assert!(train_forest(
            &f,
            &[true, false],
            &ForestConfig {
                n_trees: 0,
                ..Default::default()
            }
        )
        .is_err());
    }

    #[test]
    fn single_leaf_tree_predicts_constant() {
        let model = ForestModel::from_trees(vec![DecisionTree::leaf(1.0)], vec!["a".into()], vec![0.0]).unwrap();
        let out = predict(&model, &[vec![0.0], vec![-5.0], vec![99.0]]).unwrap();
        assert_eq!(out, [1.0, 1.0, 1.0]);
        assert!(predict(&model, &[vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn depth_limit_and_min_split_respected() {
        let features: Vec<Vec<f64>> = (0..32).map(|i| vec![i as f64]).collect();
        let labels: Vec<bool> = (0..32).map(|i| i % 2 == 0).collect();
        let stump = train_forest(
            &features,
            &labels,
            &ForestConfig {
                max_depth: 1,
                ..single_tree()
            },
        )
        .unwrap();
        assert_eq!(stump.trees()[0].nodes().len(), 3);

        let no_split = train_forest(
            &features,
            &labels,
            &ForestConfig {
                min_samples_split: 64,
                ..single_tree()
            },
        )
        .unwrap();
        assert_eq!(no_split.trees()[0].nodes().len(), 1);
        assert_eq!(no_split.importances(), &[0.0]);
    }

    #[test]
    fn training_is_deterministic() {
        let features: Vec<Vec<f64>> = (0..60)
            .map(|i| vec![(i * 7 % 13) as f64, (i % 5) as f64, i as f64])
            .collect();
        let labels: Vec<bool> = (0..60).map(|i| (i * 7 % 13) > 6 || i % 5 == 0).collect();
        let cfg = ForestConfig {
            seed: 42,
            n_trees: 25,
            ..Default::default()
        };
        let a = train_forest(&features, &labels, &cfg).unwrap();
        let b = train_forest(&features, &labels, &cfg).unwrap();
        assert_eq!(a, b);
        let sum: f64 = a.importances().iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }
}
