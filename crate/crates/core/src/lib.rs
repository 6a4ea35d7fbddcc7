//! Next-day stock price forecasting.
//!
//! Two tracks share one data pipeline: an LSTM over sliding windows of
//! closes, and a random forest over daily news sentiment plus macro
//! features. Classical baselines and a walk-forward evaluation harness
//! complete the comparison.

pub mod classical;
pub mod data;
pub mod dataset;
pub mod eval;
pub mod ingest;
pub mod model;
pub mod neural;
pub mod sentiment;
