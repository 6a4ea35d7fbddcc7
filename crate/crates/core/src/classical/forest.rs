use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{RegressionTree, TreeConfig};
use super::ClassicalError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Defaults to `ceil(p / 3)`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 1,
            max_features: None,
            bootstrap: true,
            seed: 42,
        }
    }
}

impl ForestConfig {
    fn tree_config(&self, p: usize) -> Result<TreeConfig, ClassicalError> {
        if self.n_trees == 0 {
            return Err(ClassicalError::InvalidConfig("n_trees must be >= 1".into()));
        }
        if self.min_samples_leaf == 0 {
            return Err(ClassicalError::InvalidConfig(
                "min_samples_leaf must be >= 1".into(),
            ));
        }
        let m = self.max_features.unwrap_or(p.div_ceil(3));
        if m == 0 || m > p {
            return Err(ClassicalError::InvalidConfig(format!(
                "max_features {m} outside 1..={p}"
            )));
        }
        Ok(TreeConfig {
            max_depth: self.max_depth,
            min_samples_leaf: self.min_samples_leaf,
            max_features: m,
        })
    }
}

/// Bagged regression trees; predictions are the mean over trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<RegressionTree>,
    pub n_features: usize,
}

/// Tree `i` draws from stream `i` of the master seed, so the result does not
/// depend on how trees are scheduled across threads.
pub fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

impl RandomForest {
    pub fn fit<X: AsRef<[f64]> + Sync>(
        rows: &[X],
        targets: &[f64],
        config: &ForestConfig,
    ) -> Result<Self, ClassicalError> {
        let n = rows.len();
        if n < 2 || targets.len() != n {
            return Err(ClassicalError::TooFewSamples(format!(
                "{n} rows and {} targets",
                targets.len()
            )));
        }
        let p = rows[0].as_ref().len();
        if rows.iter().any(|r| r.as_ref().len() != p) {
            return Err(ClassicalError::SchemaMismatch {
                expected: p,
                got: 0,
            });
        }
        let tree_cfg = config.tree_config(p)?;
        let trees = (0..config.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = tree_rng(config.seed, t);
                let sample: Vec<usize> = if config.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                RegressionTree::fit(rows, targets, &sample, &tree_cfg, &mut rng)
            })
            .collect();
        Ok(Self {
            trees,
            n_features: p,
        })
    }

    pub fn predict(&self, row: &[f64]) -> Result<f64, ClassicalError> {
        if row.len() != self.n_features {
            return Err(ClassicalError::SchemaMismatch {
                expected: self.n_features,
                got: row.len(),
            });
        }
        let sum: f64 = self.trees.iter().map(|t| t.predict(row)).sum();
        Ok(sum / self.trees.len() as f64)
    }
}
