use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ClassicalError;

/// Ridge strength used when the normal equations are rank deficient.
pub const RIDGE_LAMBDA: f64 = 1e-8;

/// Smallest eigenvalue of the standardized Gram matrix, relative to the
/// largest, below which the design counts as rank deficient.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// True when the ridge fallback was needed.
    pub ridge: bool,
}

impl LinearModel {
    /// Least squares via the normal equations on standardized columns.
    /// Constant columns get a zero slope.
    pub fn fit<X: AsRef<[f64]>>(rows: &[X], targets: &[f64]) -> Result<Self, ClassicalError> {
        let n = rows.len();
        let p = rows.first().map_or(0, |r| r.as_ref().len());
        if n != targets.len() || n <= p || n < 2 {
            return Err(ClassicalError::TooFewSamples(format!(
                "{n} rows for {p} columns (need rows > columns)"
            )));
        }
        if rows.iter().any(|r| r.as_ref().len() != p) {
            return Err(ClassicalError::SchemaMismatch {
                expected: p,
                got: 0,
            });
        }
        let y_mean = targets.iter().sum::<f64>() / n as f64;
        let mut means = vec![0.0; p];
        for r in rows {
            for (m, x) in means.iter_mut().zip(r.as_ref()) {
                *m += x / n as f64;
            }
        }
        let mut scales = vec![0.0; p];
        for r in rows {
            for j in 0..p {
                let d = r.as_ref()[j] - means[j];
                scales[j] += d * d;
            }
        }
        let active: Vec<usize> = (0..p).filter(|&j| scales[j] > 0.0).collect();
        let mut ridge = active.len() < p;
        let k = active.len();
        let z = DMatrix::from_fn(n, k, |i, c| {
            let j = active[c];
            (rows[i].as_ref()[j] - means[j]) / scales[j].sqrt()
        });
        let yc = DVector::from_iterator(n, targets.iter().map(|t| t - y_mean));
        let mut gram = z.transpose() * &z;
        let rhs = z.transpose() * yc;

        let mut beta_z = DVector::zeros(k);
        if k > 0 {
            let eig = gram.clone().symmetric_eigenvalues();
            let hi = eig.max();
            let lo = eig.min();
            if !(lo > hi * RANK_TOLERANCE) {
                ridge = true;
                for d in 0..k {
                    gram[(d, d)] += RIDGE_LAMBDA;
                }
            }
            beta_z = match gram.clone().cholesky() {
                Some(ch) => ch.solve(&rhs),
                None => {
                    ridge = true;
                    for d in 0..k {
                        gram[(d, d)] += RIDGE_LAMBDA;
                    }
                    gram.lu().solve(&rhs).ok_or_else(|| {
                        ClassicalError::TooFewSamples("singular design matrix".into())
                    })?
                }
            };
        }
        let mut coefficients = vec![0.0; p];
        for (c, &j) in active.iter().enumerate() {
            coefficients[j] = beta_z[c] / scales[j].sqrt();
        }
        let intercept = y_mean
            - coefficients
                .iter()
                .zip(&means)
                .map(|(b, m)| b * m)
                .sum::<f64>();
        Ok(Self {
            coefficients,
            intercept,
            ridge,
        })
    }

    pub fn predict(&self, row: &[f64]) -> Result<f64, ClassicalError> {
        if row.len() != self.coefficients.len() {
            return Err(ClassicalError::SchemaMismatch {
                expected: self.coefficients.len(),
                got: row.len(),
            });
        }
        Ok(self.intercept
            + self
                .coefficients
                .iter()
                .zip(row)
                .map(|(b, x)| b * x)
                .sum::<f64>())
    }
}
