use serde::{Deserialize, Serialize};

use super::ClassicalError;

pub const K_GRID: std::ops::RangeInclusive<usize> = 2..=9;
pub const CV_FOLDS: usize = 5;

/// Euclidean k-nearest-neighbour regressor over stored training windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    /// Cross-validated RMSE per candidate k, in grid order.
    pub cv_rmse: Vec<(usize, f64)>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of `pool` sorted by distance to `query`, ties by index.
fn ranked(inputs: &[Vec<f64>], pool: &[usize], query: &[f64]) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> = pool
        .iter()
        .map(|&i| (sq_dist(&inputs[i], query), i))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.into_iter().map(|(_, i)| i).collect()
}

fn mean_of(targets: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| targets[i]).sum::<f64>() / idx.len() as f64
}

/// Contiguous fold boundaries; the first `n % folds` folds get one extra.
fn folds(n: usize, k: usize) -> Vec<std::ops::Range<usize>> {
    let base = n / k;
    let extra = n % k;
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        out.push(start..start + len);
        start += len;
    }
    out
}

impl KnnModel {
    pub fn with_k(
        inputs: Vec<Vec<f64>>,
        targets: Vec<f64>,
        k: usize,
    ) -> Result<Self, ClassicalError> {
        if inputs.is_empty() || inputs.len() != targets.len() {
            return Err(ClassicalError::TooFewSamples(format!(
                "{} inputs and {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        if k == 0 {
            return Err(ClassicalError::InvalidConfig("k must be >= 1".into()));
        }
        Ok(Self {
            k,
            inputs,
            targets,
            cv_rmse: Vec::new(),
        })
    }

    /// Picks k from [`K_GRID`] by contiguous 5-fold cross-validated RMSE.
    pub fn fit_cv(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self, ClassicalError> {
        let n = inputs.len();
        if n < 10 || targets.len() != n {
            return Err(ClassicalError::TooFewSamples(format!(
                "{n} training windows, need at least 10"
            )));
        }
        let ks: Vec<usize> = K_GRID.collect();
        let mut sse = vec![0.0; ks.len()];
        for fold in folds(n, CV_FOLDS) {
            let pool: Vec<usize> = (0..n).filter(|i| !fold.contains(i)).collect();
            for q in fold {
                let order = ranked(&inputs, &pool, &inputs[q]);
                for (slot, &k) in ks.iter().enumerate() {
                    let take = k.min(order.len());
                    let e = mean_of(&targets, &order[..take]) - targets[q];
                    sse[slot] += e * e;
                }
            }
        }
        let cv_rmse: Vec<(usize, f64)> = ks
            .iter()
            .zip(&sse)
            .map(|(&k, &s)| (k, (s / n as f64).sqrt()))
            .collect();
        let mut best = cv_rmse[0];
        for &c in &cv_rmse[1..] {
            if c.1 < best.1 {
                best = c;
            }
        }
        Ok(Self {
            k: best.0,
            inputs,
            targets,
            cv_rmse,
        })
    }

    pub fn predict(&self, query: &[f64]) -> Result<f64, ClassicalError> {
        let dim = self.inputs[0].len();
        if query.len() != dim {
            return Err(ClassicalError::SchemaMismatch {
                expected: dim,
                got: query.len(),
            });
        }
        let pool: Vec<usize> = (0..self.inputs.len()).collect();
        let order = ranked(&self.inputs, &pool, query);
        let take = self.k.min(order.len());
        Ok(mean_of(&self.targets, &order[..take]))
    }
}
