use serde::{Deserialize, Serialize};

use super::EvalError;

fn check(pred: &[f64], actual: &[f64]) -> Result<(), EvalError> {
    if pred.len() != actual.len() {
        return Err(EvalError::LengthMismatch {
            predicted: pred.len(),
            actual: actual.len(),
        });
    }
    if pred.is_empty() {
        return Err(EvalError::EmptySeries);
    }
    Ok(())
}

/// Root mean squared error, in the units of the series.
pub fn rmse(pred: &[f64], actual: &[f64]) -> Result<f64, EvalError> {
    check(pred, actual)?;
    let sse: f64 = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum();
    Ok((sse / pred.len() as f64).sqrt())
}

/// Mean absolute percentage error, in percent.
pub fn mape(pred: &[f64], actual: &[f64]) -> Result<f64, EvalError> {
    check(pred, actual)?;
    if let Some(i) = actual.iter().position(|&a| a == 0.0) {
        return Err(EvalError::ZeroActual(i));
    }
    let sum: f64 = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| ((p - a) / a).abs())
        .sum();
    Ok(100.0 * sum / pred.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub rmse: f64,
    pub mape: f64,
    pub n: usize,
}

impl MetricSet {
    pub fn compute(pred: &[f64], actual: &[f64]) -> Result<Self, EvalError> {
        Ok(Self {
            rmse: rmse(pred, actual)?,
            mape: mape(pred, actual)?,
            n: pred.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        let r = rmse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 5.0]).unwrap();
        assert!((r - (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((r - 1.1547).abs() < 1e-4);
        assert!((mape(&[98.0], &[100.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!((rmse(&[427.0], &[426.75]).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert_eq!(rmse(&[], &[]), Err(EvalError::EmptySeries));
        assert!(matches!(
            rmse(&[1.0], &[1.0, 2.0]),
            Err(EvalError::LengthMismatch { .. })
        ));
        assert_eq!(
            mape(&[1.0, 1.0], &[1.0, 0.0]),
            Err(EvalError::ZeroActual(1))
        );
    }
}
