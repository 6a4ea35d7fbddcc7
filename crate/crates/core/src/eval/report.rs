use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CorrelationMatrix, EvalError, ForecastSeries, MetricSet};
use crate::data::TradingDate;

/// Model keys used for the per-stock comparison tables.
pub const NEURAL_KEY: &str = "lstm";
pub const SENTIMENT_KEY: &str = "forest";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub ticker: String,
    /// Short key, e.g. `lstm`; used in file names.
    pub model: String,
    /// Display name, e.g. `Bidirectional LSTM`.
    pub label: String,
    pub train_dates: Vec<TradingDate>,
    pub train_actual: Vec<f64>,
    pub validation: ForecastSeries,
}

impl ReportEntry {
    pub fn metrics(&self) -> MetricSet {
        self.validation.metrics
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub seed: u64,
    pub config_digest: String,
    /// Date for the predicted-vs-actual table; the last validation date
    /// when unset.
    pub prediction_date: Option<TradingDate>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ForecastReport {
    pub metadata: ReportMetadata,
    pub entries: Vec<ReportEntry>,
    pub correlations: Vec<(String, CorrelationMatrix)>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EmitOptions {
    pub svg: bool,
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EvalError + '_ {
    move |e| EvalError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

impl ForecastReport {
    fn tickers(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.ticker.as_str()) {
                out.push(&e.ticker);
            }
        }
        out
    }

    fn entry(&self, ticker: &str, model: &str) -> Option<&ReportEntry> {
        self.entries
            .iter()
            .find(|e| e.ticker == ticker && e.model == model)
    }

    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("ticker,model,rmse,mape,n\n");
        for e in &self.entries {
            let m = e.metrics();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                e.ticker, e.model, m.rmse, m.mape, m.n
            );
        }
        out
    }

    pub fn series_csv(entry: &ReportEntry) -> String {
        let mut out = String::from("date,split,actual,predicted\n");
        for (d, a) in entry.train_dates.iter().zip(&entry.train_actual) {
            let _ = writeln!(out, "{d},train,{a},");
        }
        let v = &entry.validation;
        for ((d, a), p) in v.dates.iter().zip(&v.actual).zip(&v.predicted) {
            let _ = writeln!(out, "{d},validation,{a},{p}");
        }
        out
    }

    fn prediction_date(&self) -> Option<TradingDate> {
        self.metadata.prediction_date.or_else(|| {
            self.entries
                .iter()
                .filter_map(|e| e.validation.dates.last().copied())
                .min()
        })
    }

    pub fn markdown(&self) -> String {
        let mut md = String::from("# Forecast report\n\n");
        let _ = writeln!(md, "- seed: {}", self.metadata.seed);
        if !self.metadata.config_digest.is_empty() {
            let _ = writeln!(md, "- config digest: `{}`", self.metadata.config_digest);
        }
        for t in self.tickers() {
            if let Some(e) = self.entries.iter().find(|e| e.ticker == t) {
                let v = &e.validation.dates;
                let range = |d: &[TradingDate]| match (d.first(), d.last()) {
                    (Some(a), Some(b)) => format!("{a} to {b} ({} rows)", d.len()),
                    _ => "none".to_string(),
                };
                let _ = writeln!(
                    md,
                    "- {t}: train {}, validation {}",
                    range(&e.train_dates),
                    range(v)
                );
            }
        }

        md.push_str("\n## RMSE values for different models\n");
        for t in self.tickers() {
            let _ = write!(
                md,
                "\n### {t}\n\n| Models | RMSE | MAPE% | n |\n|---|---:|---:|---:|\n"
            );
            for e in self.entries.iter().filter(|e| e.ticker == t) {
                let m = e.metrics();
                let _ = writeln!(
                    md,
                    "| {} | {:.2} | {:.2} | {} |",
                    e.label, m.rmse, m.mape, m.n
                );
            }
        }

        if let Some(date) = self.prediction_date() {
            let day = date.naive().format("%-d%b");
            let _ = write!(
                md,
                "\n## Predicted and actual prices of stocks\n\n| Stocks | Actual value_{day} | LSTM Prediction | Sentiment analysis |\n|---|---:|---:|---:|\n"
            );
            for t in self.tickers() {
                let at = |model: &str| -> Option<(f64, f64)> {
                    let s = &self.entry(t, model)?.validation;
                    let i = s.dates.iter().position(|d| *d == date)?;
                    Some((s.actual[i], s.predicted[i]))
                };
                let (lstm, forest) = (at(NEURAL_KEY), at(SENTIMENT_KEY));
                let actual = self.entries.iter().filter(|e| e.ticker == t).find_map(|e| {
                    e.validation
                        .dates
                        .iter()
                        .position(|d| *d == date)
                        .map(|i| e.validation.actual[i])
                });
                let cell = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.2}"));
                let _ = writeln!(
                    md,
                    "| {t} | {} | {} | {} |",
                    cell(actual),
                    cell(lstm.map(|p| p.1)),
                    cell(forest.map(|p| p.1))
                );
            }
        }

        md.push_str(
            "\n## RMSE values and MAPE for stock prices\n\n| Stocks | LSTM RMSE | LSTM MAPE% | Sentiment Analysis RMSE | Sentiment Analysis MAPE% |\n|---|---:|---:|---:|---:|\n",
        );
        for t in self.tickers() {
            let cells = |model: &str| match self.entry(t, model) {
                Some(e) => (
                    format!("{:.2}", e.metrics().rmse),
                    format!("{:.2}", e.metrics().mape),
                ),
                None => ("n/a".to_string(), "n/a".to_string()),
            };
            let (lr, lm) = cells(NEURAL_KEY);
            let (sr, sm) = cells(SENTIMENT_KEY);
            let _ = writeln!(md, "| {t} | {lr} | {lm} | {sr} | {sm} |");
        }

        for (ticker, m) in &self.correlations {
            let _ = write!(
                md,
                "\n## Correlation of macro parameters and close price: {ticker}\n\n|  |"
            );
            for c in &m.columns {
                let _ = write!(md, " {c} |");
            }
            md.push_str("\n|---|");
            md.push_str(&"---:|".repeat(m.columns.len()));
            md.push('\n');
            for (i, c) in m.columns.iter().enumerate() {
                let _ = write!(md, "| {c} |");
                for j in 0..m.columns.len() {
                    let _ = write!(md, " {:.3} |", m.get(i, j));
                }
                md.push('\n');
            }
        }
        md
    }
}

/// Minimal two-line chart: actual closes over train and validation, and the
/// validation predictions.
pub fn series_svg(entry: &ReportEntry) -> String {
    let (w, h, pad) = (800.0, 300.0, 30.0);
    let v = &entry.validation;
    let n = entry.train_actual.len() + v.actual.len();
    let all = entry
        .train_actual
        .iter()
        .chain(&v.actual)
        .chain(&v.predicted);
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
        (a.min(x), b.max(x))
    });
    let span = if hi > lo { hi - lo } else { 1.0 };
    let x = |i: usize| pad + (w - 2.0 * pad) * i as f64 / (n.max(2) - 1) as f64;
    let y = |p: f64| h - pad - (h - 2.0 * pad) * (p - lo) / span;
    let line = |points: Vec<(f64, f64)>, color: &str| {
        let pts: Vec<String> = points
            .iter()
            .map(|(a, b)| format!("{a:.2},{b:.2}"))
            .collect();
        format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.join(" ")
        )
    };
    let offset = entry.train_actual.len();
    let train: Vec<(f64, f64)> = entry
        .train_actual
        .iter()
        .enumerate()
        .map(|(i, &p)| (x(i), y(p)))
        .collect();
    let val: Vec<(f64, f64)> = v
        .actual
        .iter()
        .enumerate()
        .map(|(i, &p)| (x(offset + i), y(p)))
        .collect();
    let pred: Vec<(f64, f64)> = v
        .predicted
        .iter()
        .enumerate()
        .map(|(i, &p)| (x(offset + i), y(p)))
        .collect();
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<text x=\"{pad}\" y=\"20\" font-size=\"14\">{} {}</text>\n",
        entry.ticker, entry.label
    );
    svg.push_str(&line(train, "#1f77b4"));
    svg.push_str(&line(val, "#ff7f0e"));
    svg.push_str(&line(pred, "#2ca02c"));
    svg.push_str("</svg>\n");
    svg
}

/// Writes `metrics.csv`, one `series_<ticker>_<model>.csv` per entry,
/// `report.md`, and optionally one SVG per entry.
pub fn emit_report(
    report: &ForecastReport,
    out_dir: &Path,
    options: EmitOptions,
) -> Result<Vec<PathBuf>, EvalError> {
    if report.entries.is_empty() {
        return Err(EvalError::Empty);
    }
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<(), EvalError> {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(io_err(&path))?;
        written.push(path);
        Ok(())
    };
    put("metrics.csv".into(), report.metrics_csv())?;
    for e in &report.entries {
        let stem = format!("{}_{}", file_safe(&e.ticker), file_safe(&e.model));
        put(format!("series_{stem}.csv"), ForecastReport::series_csv(e))?;
        if options.svg {
            put(format!("series_{stem}.svg"), series_svg(e))?;
        }
    }
    put("report.md".into(), report.markdown())?;
    Ok(written)
}
