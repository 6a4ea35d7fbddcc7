use serde::{Deserialize, Serialize};

use super::params::{LstmParams, LstmTopology};
use super::train::{predict_scaled, EpochRecord, TrainConfig};
use super::NeuralError;
use crate::dataset::MinMaxScaler;

pub const NEURAL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedTensor {
    pub name: String,
    pub values: Vec<f64>,
}

/// Trained network plus everything needed to turn raw closes into a raw
/// next-day prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuralModelArtifact {
    pub format_version: u32,
    pub topology: LstmTopology,
    pub tensors: Vec<NamedTensor>,
    pub scaler: MinMaxScaler,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub seed: u64,
    pub train_config: TrainConfig,
}

impl NeuralModelArtifact {
    pub fn new(
        params: &LstmParams,
        scaler: MinMaxScaler,
        history: Vec<EpochRecord>,
        best_epoch: usize,
        train_config: TrainConfig,
    ) -> Self {
        let tensors = params
            .tensor_names()
            .into_iter()
            .map(|(name, offset, len)| NamedTensor {
                name,
                values: params.values()[offset..offset + len].to_vec(),
            })
            .collect();
        Self {
            format_version: NEURAL_FORMAT_VERSION,
            topology: params.topology().clone(),
            tensors,
            scaler,
            history,
            best_epoch,
            seed: train_config.seed,
            train_config,
        }
    }

    pub fn params(&self) -> Result<LstmParams, NeuralError> {
        if self.format_version != NEURAL_FORMAT_VERSION {
            return Err(NeuralError::FormatVersion(self.format_version));
        }
        let mut p = LstmParams::zeros(&self.topology)?;
        let layout = p.tensor_names();
        if layout.len() != self.tensors.len() {
            return Err(NeuralError::ShapeMismatch(format!(
                "expected {} tensors, found {}",
                layout.len(),
                self.tensors.len()
            )));
        }
        for ((name, offset, len), t) in layout.iter().zip(&self.tensors) {
            if *name != t.name || *len != t.values.len() {
                return Err(NeuralError::ShapeMismatch(format!(
                    "tensor {} ({} values) does not match {name} ({len})",
                    t.name,
                    t.values.len()
                )));
            }
            p.values_mut()[*offset..offset + len].copy_from_slice(&t.values);
        }
        LstmParams::from_values(&self.topology, p.values().to_vec())
    }

    /// Next-day prediction, in price units, from the last `W` raw closes.
    pub fn predict_next(&self, recent_closes: &[f64]) -> Result<f64, NeuralError> {
        Ok(self.predict_many(&[recent_closes])?[0])
    }

    /// Batched [`Self::predict_next`].
    pub fn predict_many(&self, windows: &[&[f64]]) -> Result<Vec<f64>, NeuralError> {
        let params = self.params()?;
        let scaled: Vec<Vec<f64>> = windows
            .iter()
            .map(|w| self.scaler.apply_all(0, w))
            .collect();
        let refs: Vec<&[f64]> = scaled.iter().map(|w| w.as_slice()).collect();
        Ok(predict_scaled(&params, &refs)?
            .into_iter()
            .map(|y| self.scaler.inverse(0, y))
            .collect())
    }

    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
