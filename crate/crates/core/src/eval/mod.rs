//! Error metrics, walk-forward evaluation, correlation analysis and report
//! emission.

mod correlation;
mod metrics;
mod report;
mod walk;

use thiserror::Error;

pub use correlation::{correlation_matrix, pearson, CorrelationMatrix};
pub use metrics::{mape, rmse, MetricSet};
pub use report::{
    emit_report, series_svg, EmitOptions, ForecastReport, ReportEntry, ReportMetadata, NEURAL_KEY,
    SENTIMENT_KEY,
};
pub use walk::{
    walk_forward, ForecastSeries, History, OneStepForecaster, Persistence, WalkForward,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{predicted} predictions vs {actual} actual values")]
    LengthMismatch { predicted: usize, actual: usize },
    #[error("empty series")]
    EmptySeries,
    #[error("actual value at index {0} is zero")]
    ZeroActual(usize),
    #[error("invalid evaluation range: {0}")]
    Range(String),
    #[error("column {0} is constant")]
    ConstantColumn(String),
    #[error("model failed: {0}")]
    Model(String),
    #[error("report is empty")]
    Empty,
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
