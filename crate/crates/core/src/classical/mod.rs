//! Random forest over sentiment and macro features, plus the classical
//! baselines: linear regression, KNN, seasonal ARIMA and a linear trend.

pub mod arima;
mod forest;
mod knn;
mod linreg;
pub mod optim;
pub mod tree;
mod trend;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{FeatureTable, SplitSpec, FEATURE_COLUMNS};

pub use arima::{ArimaCoefficients, ArimaModel, ArimaSpec};
pub use forest::{tree_rng, ForestConfig, RandomForest};
pub use knn::{KnnModel, CV_FOLDS, K_GRID};
pub use linreg::{LinearModel, RIDGE_LAMBDA};
pub use tree::{Node, RegressionTree, TreeConfig};
pub use trend::TrendModel;

pub const CLASSICAL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassicalError {
    #[error("too few samples: {0}")]
    TooFewSamples(String),
    #[error("feature row has {got} columns, model expects {expected}")]
    SchemaMismatch { expected: usize, got: usize },
    #[error("series of length {len} is too short, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported artifact format version {0}")]
    FormatVersion(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassicalModel {
    Forest(RandomForest),
    Linreg(LinearModel),
    Knn(KnnModel),
    Arima(ArimaModel),
    Additive(TrendModel),
}

/// Versioned envelope around one fitted classical model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalModelArtifact {
    pub format_version: u32,
    /// Input columns, in order. Window models list `lag_<k>` names.
    pub feature_schema: Vec<String>,
    pub seed: Option<u64>,
    pub model: ClassicalModel,
}

impl ClassicalModelArtifact {
    pub fn new(model: ClassicalModel, feature_schema: Vec<String>, seed: Option<u64>) -> Self {
        Self {
            format_version: CLASSICAL_FORMAT_VERSION,
            feature_schema,
            seed,
            model,
        }
    }

    pub fn check_version(&self) -> Result<(), ClassicalError> {
        if self.format_version == CLASSICAL_FORMAT_VERSION {
            Ok(())
        } else {
            Err(ClassicalError::FormatVersion(self.format_version))
        }
    }

    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Column names for a length-`window` lag vector, oldest first.
pub fn window_schema(window: usize) -> Vec<String> {
    (0..window).map(|k| format!("lag_{}", window - k)).collect()
}

/// Trains on feature rows whose target lies before panel row
/// `split.split_index`.
pub fn forest_train(
    table: &FeatureTable,
    split: &SplitSpec,
    config: &ForestConfig,
) -> Result<ClassicalModelArtifact, ClassicalError> {
    let n = table.rows_before(split.split_index);
    if n < 2 {
        return Err(ClassicalError::TooFewSamples(format!("{n} training rows")));
    }
    let forest = RandomForest::fit(&table.features[..n], &table.targets[..n], config)?;
    Ok(ClassicalModelArtifact::new(
        ClassicalModel::Forest(forest),
        FEATURE_COLUMNS.iter().map(|s| s.to_string()).collect(),
        Some(config.seed),
    ))
}

pub fn forest_predict(
    artifact: &ClassicalModelArtifact,
    row: &[f64],
) -> Result<f64, ClassicalError> {
    artifact.check_version()?;
    if row.len() != artifact.feature_schema.len() {
        return Err(ClassicalError::SchemaMismatch {
            expected: artifact.feature_schema.len(),
            got: row.len(),
        });
    }
    match &artifact.model {
        ClassicalModel::Forest(f) => f.predict(row),
        _ => Err(ClassicalError::InvalidConfig(
            "artifact does not hold a forest".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::TradingDate;

    fn table(n: usize) -> FeatureTable {
        let d0 = TradingDate::from_ymd(2021, 1, 4).unwrap();
        let features: Vec<[f64; 9]> = (0..n)
            .map(|i| {
                let x = i as f64;
                [100.0 + x, 0.1, 0.0, 0.9, 0.2, 1800.0 + x, 70.0, 6.0, 74.0]
            })
            .collect();
        FeatureTable {
            dates: (0..n).map(|i| d0.add_days(i as i64)).collect(),
            target_dates: (0..n).map(|i| d0.add_days(i as i64 + 1)).collect(),
            targets: (0..n).map(|i| 101.0 + i as f64).collect(),
            features,
        }
    }

    #[test]
    fn forest_artifact_round_trip() {
        let t = table(30);
        let split = SplitSpec::at(31, 25).unwrap();
        let cfg = ForestConfig {
            n_trees: 5,
            ..ForestConfig::default()
        };
        let art = forest_train(&t, &split, &cfg).unwrap();
        let back = ClassicalModelArtifact::from_json(&art.to_json().unwrap()).unwrap();
        assert_eq!(back, art);
        let row = t.features[3];
        assert_eq!(
            forest_predict(&back, &row).unwrap(),
            forest_predict(&art, &row).unwrap()
        );
        assert!(matches!(
            forest_predict(&art, &row[..4]),
            Err(ClassicalError::SchemaMismatch {
                expected: 9,
                got: 4
            })
        ));
    }

    #[test]
    fn forest_sees_only_rows_before_split() {
        let t = table(30);
        let split = SplitSpec::at(31, 11).unwrap();
        let cfg = ForestConfig {
            n_trees: 1,
            max_depth: Some(0),
            bootstrap: false,
            ..ForestConfig::default()
        };
        let art = forest_train(&t, &split, &cfg).unwrap();
        // targets 101..=110 are the ten rows whose target row is < 11
        let mean = (101..=110).sum::<i32>() as f64 / 10.0;
        assert_eq!(forest_predict(&art, &t.features[0]).unwrap(), mean);
    }

    #[test]
    fn window_schema_names() {
        assert_eq!(window_schema(3), vec!["lag_3", "lag_2", "lag_1"]);
    }
}
