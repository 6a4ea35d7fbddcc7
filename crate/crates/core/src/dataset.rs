//! Min-max scaling, sliding windows for the sequence models, the tabular
//! feature table for the sentiment forest, and chronological splitting.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{AlignedPanel, TradingDate};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("feature {0} has a degenerate range (constant column)")]
    DegenerateRange(usize),
    #[error("window length {window} must be >= 1 and shorter than the series ({len})")]
    WindowTooLong { window: usize, len: usize },
    #[error("panel has no sentiment columns")]
    MissingSentiment,
    #[error("too few samples: {0}")]
    TooFewSamples(String),
    #[error("train fraction {0} must lie strictly between 0 and 1")]
    InvalidFraction(f64),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("scaler has {expected} features, got {got}")]
    FeatureCount { expected: usize, got: usize },
}

/// Per-feature linear map of the training range onto [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl MinMaxScaler {
    /// Fits one (min, max) pair per column.
    pub fn fit(columns: &[&[f64]]) -> Result<Self, DatasetError> {
        let mut mins = Vec::with_capacity(columns.len());
        let mut maxs = Vec::with_capacity(columns.len());
        for (i, col) in columns.iter().enumerate() {
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(DatasetError::DegenerateRange(i));
            }
            mins.push(lo);
            maxs.push(hi);
        }
        Ok(Self { mins, maxs })
    }

    pub fn fit_single(values: &[f64]) -> Result<Self, DatasetError> {
        Self::fit(&[values])
    }

    pub fn n_features(&self) -> usize {
        self.mins.len()
    }

    pub fn min(&self, feature: usize) -> f64 {
        self.mins[feature]
    }

    pub fn max(&self, feature: usize) -> f64 {
        self.maxs[feature]
    }

    pub fn range(&self, feature: usize) -> f64 {
        self.maxs[feature] - self.mins[feature]
    }

    pub fn apply(&self, feature: usize, x: f64) -> f64 {
        (x - self.mins[feature]) / self.range(feature)
    }

    pub fn inverse(&self, feature: usize, x: f64) -> f64 {
        x * self.range(feature) + self.mins[feature]
    }

    pub fn apply_all(&self, feature: usize, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.apply(feature, x)).collect()
    }
}

/// Scaled (window → next value) samples over one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowedDataset {
    pub window_len: usize,
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    /// Index of each target in the source series.
    pub target_indices: Vec<usize>,
    pub dates: Vec<TradingDate>,
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Number of leading samples whose target lies before `row`.
    pub fn samples_before(&self, row: usize) -> usize {
        self.target_indices.partition_point(|&t| t < row)
    }

    /// Rebuilds the source series from the first window and all targets.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = self.inputs.first().cloned().unwrap_or_default();
        out.extend_from_slice(&self.targets);
        out
    }
}

/// Sample `i` is `values[i..i+window] -> values[i+window]`.
pub fn build_windows(
    values: &[f64],
    dates: &[TradingDate],
    window: usize,
) -> Result<WindowedDataset, DatasetError> {
    if values.len() != dates.len() {
        return Err(DatasetError::LengthMismatch(format!(
            "{} values vs {} dates",
            values.len(),
            dates.len()
        )));
    }
    if window == 0 || window >= values.len() {
        return Err(DatasetError::WindowTooLong {
            window,
            len: values.len(),
        });
    }
    let n = values.len() - window;
    Ok(WindowedDataset {
        window_len: window,
        inputs: (0..n).map(|i| values[i..i + window].to_vec()).collect(),
        targets: values[window..].to_vec(),
        target_indices: (window..values.len()).collect(),
        dates: dates[window..].to_vec(),
    })
}

pub const FEATURE_COLUMNS: [&str; 9] = [
    "close", "pos", "neg", "neu", "compound", "gold", "brent", "gsec", "usd_inr",
];

/// Day-t features with the day-(t+1) close as target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTable {
    pub dates: Vec<TradingDate>,
    pub target_dates: Vec<TradingDate>,
    pub features: Vec<[f64; 9]>,
    pub targets: Vec<f64>,
}

impl FeatureTable {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn feature_names(&self) -> Vec<String> {
        FEATURE_COLUMNS.iter().map(|s| s.to_string()).collect()
    }

    /// Rows whose target date lies before panel row `split`.
    pub fn rows_before(&self, split: usize) -> usize {
        split.saturating_sub(1).min(self.len())
    }
}

/// Features of panel row `row` in [`FEATURE_COLUMNS`] order.
pub fn feature_row(panel: &AlignedPanel, row: usize) -> Result<[f64; 9], DatasetError> {
    let s = panel
        .sentiment
        .as_ref()
        .ok_or(DatasetError::MissingSentiment)?;
    Ok([
        panel.close[row],
        s.pos[row],
        s.neg[row],
        s.neu[row],
        s.compound[row],
        panel.gold[row],
        panel.brent[row],
        panel.gsec[row],
        panel.usd_inr[row],
    ])
}

pub fn build_feature_table(panel: &AlignedPanel) -> Result<FeatureTable, DatasetError> {
    if panel.sentiment.is_none() {
        return Err(DatasetError::MissingSentiment);
    }
    if panel.len() < 2 {
        return Err(DatasetError::TooFewSamples(format!(
            "panel has {} rows, need at least 2",
            panel.len()
        )));
    }
    let n = panel.len() - 1;
    let mut features = Vec::with_capacity(n);
    for t in 0..n {
        features.push(feature_row(panel, t)?);
    }
    Ok(FeatureTable {
        dates: panel.dates[..n].to_vec(),
        target_dates: panel.dates[1..].to_vec(),
        features,
        targets: panel.close[1..].to_vec(),
    })
}

/// Chronological train/validation boundary: indices `< split_index` train.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub split_index: usize,
    pub n: usize,
}

impl SplitSpec {
    /// Explicit boundary; `split_index` must leave both sides non-empty.
    pub fn at(n: usize, split_index: usize) -> Result<Self, DatasetError> {
        if n < 2 {
            return Err(DatasetError::TooFewSamples(format!("{n} samples")));
        }
        if split_index == 0 || split_index >= n {
            return Err(DatasetError::TooFewSamples(format!(
                "split {split_index} leaves an empty side of {n} samples"
            )));
        }
        Ok(Self {
            train_fraction: split_index as f64 / n as f64,
            split_index,
            n,
        })
    }

    pub fn train_len(&self) -> usize {
        self.split_index
    }

    pub fn validation_len(&self) -> usize {
        self.n - self.split_index
    }
}

/// `floor(n * train_fraction)`, clamped into `[1, n - 1]`.
pub fn chronological_split(n: usize, train_fraction: f64) -> Result<SplitSpec, DatasetError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DatasetError::InvalidFraction(train_fraction));
    }
    if n < 2 {
        return Err(DatasetError::TooFewSamples(format!("{n} samples")));
    }
    let idx = ((n as f64) * train_fraction).floor() as usize;
    Ok(SplitSpec {
        train_fraction,
        split_index: idx.clamp(1, n - 1),
        n,
    })
}
