use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use super::{EvalError, MetricSet};
use crate::data::{AlignedPanel, TradingDate};
use crate::dataset::feature_row;

/// Read-only view of panel rows `[0, end)`. Every row handed out is
/// recorded so a run can be audited for lookahead.
pub struct History<'a> {
    panel: &'a AlignedPanel,
    end: usize,
    log: RefCell<Vec<usize>>,
}

impl<'a> History<'a> {
    pub fn new(panel: &'a AlignedPanel, end: usize) -> Self {
        Self {
            panel,
            end: end.min(panel.len()),
            log: RefCell::new(Vec::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.end
    }

    pub fn is_empty(&self) -> bool {
        self.end == 0
    }

    pub fn ticker(&self) -> &str {
        &self.panel.ticker
    }

    fn touch(&self, rows: std::ops::Range<usize>) {
        self.log.borrow_mut().extend(rows);
    }

    pub fn date(&self, row: usize) -> Option<TradingDate> {
        (row < self.end).then(|| {
            self.touch(row..row + 1);
            self.panel.dates[row]
        })
    }

    /// All visible closes.
    pub fn closes(&self) -> &'a [f64] {
        self.touch(0..self.end);
        &self.panel.close[..self.end]
    }

    /// The last `n` visible closes, if that many exist.
    pub fn recent_closes(&self, n: usize) -> Option<&'a [f64]> {
        (n <= self.end).then(|| {
            self.touch(self.end - n..self.end);
            &self.panel.close[self.end - n..self.end]
        })
    }

    /// Feature-table row for panel row `row`.
    pub fn features(&self, row: usize) -> Result<Option<[f64; 9]>, EvalError> {
        if row >= self.end {
            return Ok(None);
        }
        self.touch(row..row + 1);
        feature_row(self.panel, row)
            .map(Some)
            .map_err(|e| EvalError::Model(e.to_string()))
    }

    /// Highest row read so far.
    pub fn max_accessed(&self) -> Option<usize> {
        self.log.borrow().iter().copied().max()
    }

    pub fn accessed(&self) -> Vec<usize> {
        self.log.borrow().clone()
    }
}

/// Predicts panel row `history.len()` from the rows before it.
pub trait OneStepForecaster {
    fn predict_next(&self, history: &History<'_>) -> Result<f64, EvalError>;
}

/// Forecast = last visible close.
pub struct Persistence;

impl OneStepForecaster for Persistence {
    fn predict_next(&self, history: &History<'_>) -> Result<f64, EvalError> {
        history
            .recent_closes(1)
            .map(|c| c[0])
            .ok_or_else(|| EvalError::Model("persistence needs one past close".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastSeries {
    pub dates: Vec<TradingDate>,
    pub actual: Vec<f64>,
    pub predicted: Vec<f64>,
    pub metrics: MetricSet,
}

/// Walk-forward output plus, per target, the rows the model read.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkForward {
    pub series: ForecastSeries,
    pub max_row_read: Vec<(usize, Option<usize>)>,
}

/// One-step predictions for each date in `validation`, each made from the
/// true history before it. Dates must be strictly increasing panel dates at
/// or after row `train_end`.
pub fn walk_forward<F: OneStepForecaster + ?Sized>(
    model: &F,
    panel: &AlignedPanel,
    validation: &[TradingDate],
    train_end: usize,
) -> Result<WalkForward, EvalError> {
    if validation.is_empty() {
        return Err(EvalError::Range("empty validation range".into()));
    }
    let mut rows = Vec::with_capacity(validation.len());
    for &d in validation {
        let row = panel
            .index_of(d)
            .ok_or_else(|| EvalError::Range(format!("{d} is not a panel date")))?;
        if row < train_end.max(1) {
            return Err(EvalError::Range(format!(
                "{d} lies inside the training range"
            )));
        }
        if rows.last().is_some_and(|&prev| row <= prev) {
            return Err(EvalError::Range(format!(
                "{d} is out of chronological order"
            )));
        }
        rows.push(row);
    }
    let mut predicted = Vec::with_capacity(rows.len());
    let mut actual = Vec::with_capacity(rows.len());
    let mut max_row_read = Vec::with_capacity(rows.len());
    for &row in &rows {
        let history = History::new(panel, row);
        let p = model.predict_next(&history)?;
        if !p.is_finite() {
            return Err(EvalError::Model(format!(
                "non-finite prediction for {}",
                panel.dates[row]
            )));
        }
        predicted.push(p);
        actual.push(panel.close[row]);
        max_row_read.push((row, history.max_accessed()));
    }
    let metrics = MetricSet::compute(&predicted, &actual)?;
    Ok(WalkForward {
        series: ForecastSeries {
            dates: validation.to_vec(),
            actual,
            predicted,
            metrics,
        },
        max_row_read,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel(n: usize) -> AlignedPanel {
        let d0 = TradingDate::from_ymd(2021, 3, 1).unwrap();
        AlignedPanel {
            ticker: "T".into(),
            dates: (0..n).map(|i| d0.add_days(i as i64)).collect(),
            close: (0..n).map(|i| 100.0 + (i * i % 7) as f64).collect(),
            gold: vec![1.0; n],
            brent: vec![1.0; n],
            gsec: vec![1.0; n],
            usd_inr: vec![1.0; n],
            sentiment: None,
        }
    }

    #[test]
    fn persistence_predicts_previous_close() {
        let p = panel(20);
        let val: Vec<TradingDate> = p.dates[15..].to_vec();
        let w = walk_forward(&Persistence, &p, &val, 15).unwrap();
        assert_eq!(w.series.predicted, p.close[14..19].to_vec());
        for (target, max) in w.max_row_read {
            assert_eq!(max, Some(target - 1));
        }
    }

    #[test]
    fn single_date_validation() {
        let p = panel(10);
        let w = walk_forward(&Persistence, &p, &p.dates[9..], 9).unwrap();
        assert_eq!(w.series.metrics.n, 1);
    }

    #[test]
    fn range_errors() {
        let p = panel(10);
        let shuffled = vec![p.dates[8], p.dates[7]];
        assert!(matches!(
            walk_forward(&Persistence, &p, &shuffled, 5),
            Err(EvalError::Range(_))
        ));
        assert!(matches!(
            walk_forward(&Persistence, &p, &p.dates[3..5], 5),
            Err(EvalError::Range(_))
        ));
        assert!(matches!(
            walk_forward(&Persistence, &p, &[], 5),
            Err(EvalError::Range(_))
        ));
        let foreign = TradingDate::from_ymd(1999, 1, 1).unwrap();
        assert!(matches!(
            walk_forward(&Persistence, &p, &[foreign], 5),
            Err(EvalError::Range(_))
        ));
    }

    #[test]
    fn history_hides_the_target() {
        let p = panel(10);
        let h = History::new(&p, 4);
        assert_eq!(h.closes().len(), 4);
        assert!(h.recent_closes(5).is_none());
        assert!(h.date(4).is_none());
        assert!(h.features(4).unwrap().is_none());
        assert_eq!(h.max_accessed(), Some(3));
    }
}
