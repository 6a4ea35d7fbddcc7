use serde::{Deserialize, Serialize};

use super::ClassicalError;

/// `y = intercept + slope * t` on the series' row index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendModel {
    pub intercept: f64,
    pub slope: f64,
}

impl TrendModel {
    /// Least-squares line through `(i, values[i])`.
    pub fn fit(values: &[f64]) -> Result<Self, ClassicalError> {
        let n = values.len();
        if n < 2 {
            return Err(ClassicalError::TooFewSamples(format!(
                "{n} points, need at least 2"
            )));
        }
        let t_mean = (n - 1) as f64 / 2.0;
        let y_mean = values.iter().sum::<f64>() / n as f64;
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        for (i, &y) in values.iter().enumerate() {
            let dt = i as f64 - t_mean;
            sxy += dt * (y - y_mean);
            sxx += dt * dt;
        }
        let slope = sxy / sxx;
        Ok(Self {
            intercept: y_mean - slope * t_mean,
            slope,
        })
    }

    pub fn predict(&self, t: usize) -> f64 {
        self.intercept + self.slope * t as f64
    }
}
