//! LSTM and bidirectional-LSTM regressors trained with BPTT and Adam.

mod artifact;
mod network;
mod params;
mod train;

use thiserror::Error;

pub use artifact::{NamedTensor, NeuralModelArtifact, NEURAL_FORMAT_VERSION};
pub use params::{DenseActivation, LstmParams, LstmTopology};
pub use train::{lstm_train, EpochRecord, TrainConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NeuralError {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("too few samples: {0}")]
    TooFewSamples(String),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("loss became non-finite at epoch {epoch}")]
    DivergedLoss { epoch: usize },
    #[error("unsupported artifact format version {0}")]
    FormatVersion(u32),
}
