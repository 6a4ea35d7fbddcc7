use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::data::{AlignedPanel, PanelColumn};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub columns: Vec<String>,
    /// Row-major, `columns.len()` squared.
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a][b]
    }
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Pairwise Pearson correlation; the diagonal is exactly 1.
pub fn correlation_matrix(
    panel: &AlignedPanel,
    columns: &[PanelColumn],
) -> Result<CorrelationMatrix, EvalError> {
    if panel.len() < 3 {
        return Err(EvalError::Range(format!(
            "{} rows, need at least 3",
            panel.len()
        )));
    }
    let mut data = Vec::with_capacity(columns.len());
    for &c in columns {
        let col = panel
            .column(c)
            .ok_or_else(|| EvalError::Range(format!("panel has no {} column", c.name())))?;
        if col.iter().all(|&v| v == col[0]) {
            return Err(EvalError::ConstantColumn(c.name().to_string()));
        }
        data.push(col);
    }
    let k = columns.len();
    let mut values = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let r = pearson(data[i], data[j]);
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        columns: columns.iter().map(|c| c.name().to_string()).collect(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::TradingDate;

    fn panel() -> AlignedPanel {
        let d0 = TradingDate::from_ymd(2020, 1, 1).unwrap();
        let n = 6;
        let x: Vec<f64> = (0..n).map(|i| (i * i) as f64).collect();
        AlignedPanel {
            ticker: "T".into(),
            dates: (0..n).map(|i| d0.add_days(i as i64)).collect(),
            gold: x.iter().map(|v| -v).collect(),
            brent: vec![3.0; n],
            gsec: x.iter().map(|v| 2.0 * v + 1.0).collect(),
            usd_inr: vec![1.0, 4.0, 2.0, 8.0, 5.0, 7.0],
            close: x,
            sentiment: None,
        }
    }

    #[test]
    fn identities() {
        let cols = [
            PanelColumn::Close,
            PanelColumn::Gold,
            PanelColumn::Gsec,
            PanelColumn::UsdInr,
        ];
        let m = correlation_matrix(&panel(), &cols).unwrap();
        assert_eq!(m.get(0, 0), 1.0);
        assert!((m.get(0, 1) + 1.0).abs() < 1e-12);
        assert!((m.get(0, 2) - 1.0).abs() < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
    }

    #[test]
    fn constant_column() {
        assert_eq!(
            correlation_matrix(&panel(), &[PanelColumn::Close, PanelColumn::Brent]),
            Err(EvalError::ConstantColumn("brent".into()))
        );
    }
}
