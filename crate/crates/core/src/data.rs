//! Dated containers for prices, macro series and daily sentiment, and the
//! alignment step that joins them onto the trading calendar of the price
//! series.
//!
//! The price series defines the calendar. Macro quotes are carried forward
//! from the most recent earlier observation (never from a later one), and
//! sentiment days without news take the neutral default record.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::sentiment::{DailySentiment, SentimentScore};

/// A calendar date, rendered and parsed strictly as `YYYY-MM-DD`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TradingDate(NaiveDate);

impl TradingDate {
    pub fn from_ymd(year: i32, month: u32, day: u32) -> Option<Self> {
        NaiveDate::from_ymd_opt(year, month, day).map(Self)
    }

    pub fn naive(&self) -> NaiveDate {
        self.0
    }

    pub fn year(&self) -> i32 {
        self.0.year()
    }

    /// Day of week, Monday = 0.
    pub fn weekday_index(&self) -> u32 {
        self.0.weekday().num_days_from_monday()
    }

    pub fn succ(&self) -> Self {
        Self(self.0.succ_opt().expect("date overflow"))
    }

    pub fn add_days(&self, days: i64) -> Self {
        Self(self.0 + chrono::Duration::days(days))
    }
}

impl From<NaiveDate> for TradingDate {
    fn from(d: NaiveDate) -> Self {
        Self(d)
    }
}

impl fmt::Display for TradingDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%d"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid date `{0}` (expected YYYY-MM-DD)")]
pub struct DateParseError(pub String);

impl FromStr for TradingDate {
    type Err = DateParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let b = s.as_bytes();
        let shape_ok = b.len() == 10
            && b[4] == b'-'
            && b[7] == b'-'
            && b.iter()
                .enumerate()
                .all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit());
        if !shape_ok {
            return Err(DateParseError(s.to_string()));
        }
        NaiveDate::parse_from_str(s, "%Y-%m-%d")
            .map(Self)
            .map_err(|_| DateParseError(s.to_string()))
    }
}

impl Serialize for TradingDate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TradingDate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One daily OHLCV bar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceBar {
    pub date: TradingDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub adj_close: f64,
    pub volume: u64,
}

impl PriceBar {
    /// Checks the bar invariants, returning the name of the offending field.
    pub fn validate(&self) -> Result<(), &'static str> {
        let prices = [
            ("Open", self.open),
            ("High", self.high),
            ("Low", self.low),
            ("Close", self.close),
            ("Adj Close", self.adj_close),
        ];
        for (name, v) in prices {
            if !v.is_finite() || v <= 0.0 {
                return Err(name);
            }
        }
        if self.low > self.high {
            return Err("Low");
        }
        if self.open < self.low || self.open > self.high {
            return Err("Open");
        }
        if self.close < self.low || self.close > self.high {
            return Err("Close");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("duplicate date {0}")]
    DuplicateDate(TradingDate),
    #[error("dates out of order at {0}")]
    Unordered(TradingDate),
    #[error("invalid value for {column} on {date}")]
    InvalidValue { date: TradingDate, column: String },
    #[error("price series for {0} is empty")]
    EmptyPrices(String),
    #[error("no {column} value at or before first price date {date}")]
    EmptyIntersection { date: TradingDate, column: String },
    #[error("no {column} observation on {date} (strict alignment)")]
    GapInStrictMode { date: TradingDate, column: String },
    #[error("column length mismatch: {0}")]
    LengthMismatch(String),
}

fn check_strictly_increasing<'a>(
    dates: impl IntoIterator<Item = &'a TradingDate>,
) -> Result<(), DataError> {
    let mut prev: Option<TradingDate> = None;
    for &d in dates {
        if let Some(p) = prev {
            if d == p {
                return Err(DataError::DuplicateDate(d));
            }
            if d < p {
                return Err(DataError::Unordered(d));
            }
        }
        prev = Some(d);
    }
    Ok(())
}

/// Daily bars for a single ticker, strictly increasing by date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    ticker: String,
    bars: Vec<PriceBar>,
}

impl PriceSeries {
    pub fn new(ticker: impl Into<String>, bars: Vec<PriceBar>) -> Result<Self, DataError> {
        check_strictly_increasing(bars.iter().map(|b| &b.date))?;
        for bar in &bars {
            if let Err(column) = bar.validate() {
                return Err(DataError::InvalidValue {
                    date: bar.date,
                    column: column.to_string(),
                });
            }
        }
        Ok(Self {
            ticker: ticker.into(),
            bars,
        })
    }

    pub fn ticker(&self) -> &str {
        &self.ticker
    }

    pub fn bars(&self) -> &[PriceBar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn dates(&self) -> Vec<TradingDate> {
        self.bars.iter().map(|b| b.date).collect()
    }

    pub fn closes(&self) -> Vec<f64> {
        self.bars.iter().map(|b| b.close).collect()
    }
}

/// The four macro features used alongside sentiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MacroColumn {
    Gold,
    Brent,
    Gsec,
    UsdInr,
}

impl MacroColumn {
    pub const ALL: [MacroColumn; 4] = [Self::Gold, Self::Brent, Self::Gsec, Self::UsdInr];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gold => "gold",
            Self::Brent => "brent",
            Self::Gsec => "gsec",
            Self::UsdInr => "usd_inr",
        }
    }

    /// Gold, Brent and USD-INR are quotes and must be positive; the bond
    /// yield only has to be finite.
    pub fn accepts(&self, value: f64) -> bool {
        match self {
            Self::Gsec => value.is_finite(),
            _ => value.is_finite() && value > 0.0,
        }
    }
}

impl fmt::Display for MacroColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MacroColumn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown macro column `{s}`"))
    }
}

/// A dated scalar series with strictly increasing dates.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DatedSeries {
    dates: Vec<TradingDate>,
    values: Vec<f64>,
}

impl DatedSeries {
    pub fn new(dates: Vec<TradingDate>, values: Vec<f64>) -> Result<Self, DataError> {
        if dates.len() != values.len() {
            return Err(DataError::LengthMismatch(format!(
                "{} dates vs {} values",
                dates.len(),
                values.len()
            )));
        }
        check_strictly_increasing(&dates)?;
        Ok(Self { dates, values })
    }

    pub fn dates(&self) -> &[TradingDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// Most recent value dated at or before `date`.
    pub fn value_at_or_before(&self, date: TradingDate) -> Option<f64> {
        let idx = self.dates.partition_point(|d| *d <= date);
        idx.checked_sub(1).map(|i| self.values[i])
    }

    pub fn value_on(&self, date: TradingDate) -> Option<f64> {
        self.dates.binary_search(&date).ok().map(|i| self.values[i])
    }
}

/// Per-feature macro series, each on its own calendar.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MacroPanel {
    pub gold: DatedSeries,
    pub brent: DatedSeries,
    pub gsec: DatedSeries,
    pub usd_inr: DatedSeries,
}

impl MacroPanel {
    pub fn new(
        gold: DatedSeries,
        brent: DatedSeries,
        gsec: DatedSeries,
        usd_inr: DatedSeries,
    ) -> Result<Self, DataError> {
        let panel = Self {
            gold,
            brent,
            gsec,
            usd_inr,
        };
        for column in MacroColumn::ALL {
            let series = panel.series(column);
            for (d, v) in series.dates.iter().zip(&series.values) {
                if !column.accepts(*v) {
                    return Err(DataError::InvalidValue {
                        date: *d,
                        column: column.name().to_string(),
                    });
                }
            }
        }
        Ok(panel)
    }

    pub fn series(&self, column: MacroColumn) -> &DatedSeries {
        match column {
            MacroColumn::Gold => &self.gold,
            MacroColumn::Brent => &self.brent,
            MacroColumn::Gsec => &self.gsec,
            MacroColumn::UsdInr => &self.usd_inr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillPolicy {
    #[default]
    ForwardFill,
    Strict,
}

/// The four sentiment columns of an aligned panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentColumns {
    pub pos: Vec<f64>,
    pub neg: Vec<f64>,
    pub neu: Vec<f64>,
    pub compound: Vec<f64>,
}

impl SentimentColumns {
    pub fn score(&self, row: usize) -> SentimentScore {
        SentimentScore {
            pos: self.pos[row],
            neg: self.neg[row],
            neu: self.neu[row],
            compound: self.compound[row],
        }
    }
}

/// Any column of an [`AlignedPanel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PanelColumn {
    Close,
    Gold,
    Brent,
    Gsec,
    UsdInr,
    Pos,
    Neg,
    Neu,
    Compound,
}

impl PanelColumn {
    pub const PRICE_AND_MACRO: [PanelColumn; 5] = [
        Self::Close,
        Self::Gold,
        Self::Brent,
        Self::Gsec,
        Self::UsdInr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Close => "close",
            Self::Gold => "gold",
            Self::Brent => "brent",
            Self::Gsec => "gsec",
            Self::UsdInr => "usd_inr",
            Self::Pos => "pos",
            Self::Neg => "neg",
            Self::Neu => "neu",
            Self::Compound => "compound",
        }
    }
}

/// Prices, macro features and (optionally) sentiment on one calendar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedPanel {
    pub ticker: String,
    pub dates: Vec<TradingDate>,
    pub close: Vec<f64>,
    pub gold: Vec<f64>,
    pub brent: Vec<f64>,
    pub gsec: Vec<f64>,
    pub usd_inr: Vec<f64>,
    pub sentiment: Option<SentimentColumns>,
}

impl AlignedPanel {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn column(&self, column: PanelColumn) -> Option<&[f64]> {
        let s = self.sentiment.as_ref();
        Some(match column {
            PanelColumn::Close => &self.close,
            PanelColumn::Gold => &self.gold,
            PanelColumn::Brent => &self.brent,
            PanelColumn::Gsec => &self.gsec,
            PanelColumn::UsdInr => &self.usd_inr,
            PanelColumn::Pos => &s?.pos,
            PanelColumn::Neg => &s?.neg,
            PanelColumn::Neu => &s?.neu,
            PanelColumn::Compound => &s?.compound,
        })
    }

    pub fn index_of(&self, date: TradingDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }

    /// Checks that every column has one cell per date and dates increase.
    pub fn validate(&self) -> Result<(), DataError> {
        check_strictly_increasing(&self.dates)?;
        let n = self.dates.len();
        let mut lens = vec![
            ("close", self.close.len()),
            ("gold", self.gold.len()),
            ("brent", self.brent.len()),
            ("gsec", self.gsec.len()),
            ("usd_inr", self.usd_inr.len()),
        ];
        if let Some(s) = &self.sentiment {
            lens.extend([
                ("pos", s.pos.len()),
                ("neg", s.neg.len()),
                ("neu", s.neu.len()),
                ("compound", s.compound.len()),
            ]);
        }
        for (name, len) in lens {
            if len != n {
                return Err(DataError::LengthMismatch(format!(
                    "column {name} has {len} rows, expected {n}"
                )));
            }
        }
        Ok(())
    }
}

fn fill_macro(
    dates: &[TradingDate],
    series: &DatedSeries,
    column: MacroColumn,
    policy: FillPolicy,
) -> Result<Vec<f64>, DataError> {
    let mut out = Vec::with_capacity(dates.len());
    // Dates of both inputs increase, so one merge pass suffices.
    let mut cursor = 0usize;
    let mut last: Option<f64> = None;
    for &date in dates {
        while cursor < series.dates.len() && series.dates[cursor] <= date {
            last = Some(series.values[cursor]);
            cursor += 1;
        }
        let exact = cursor > 0 && series.dates[cursor - 1] == date;
        match policy {
            FillPolicy::Strict if !exact => {
                return Err(DataError::GapInStrictMode {
                    date,
                    column: column.name().to_string(),
                })
            }
            _ => {}
        }
        match last {
            Some(v) => out.push(v),
            None => {
                return Err(DataError::EmptyIntersection {
                    date,
                    column: column.name().to_string(),
                })
            }
        }
    }
    Ok(out)
}

/// Joins prices, macro series and optional daily sentiment onto the price
/// calendar.
///
/// Macro gaps are forward-filled (or rejected under [`FillPolicy::Strict`]).
/// Sentiment records are matched by date; days without a record get the
/// neutral default. Sentiment records dated off the price calendar are
/// ignored.
pub fn align_panel(
    prices: &PriceSeries,
    macro_panel: &MacroPanel,
    sentiment: Option<&[DailySentiment]>,
    fill_policy: FillPolicy,
) -> Result<AlignedPanel, DataError> {
    if prices.is_empty() {
        return Err(DataError::EmptyPrices(prices.ticker().to_string()));
    }
    let dates = prices.dates();
    let close = prices.closes();
    let mut macro_cols = Vec::with_capacity(4);
    for column in MacroColumn::ALL {
        macro_cols.push(fill_macro(
            &dates,
            macro_panel.series(column),
            column,
            fill_policy,
        )?);
    }

    let sentiment = match sentiment {
        None => None,
        Some(records) => {
            let mut sorted: Vec<&DailySentiment> = records.iter().collect();
            sorted.sort_by_key(|r| r.date);
            check_strictly_increasing(sorted.iter().map(|r| &r.date))?;
            let mut cols = SentimentColumns {
                pos: Vec::with_capacity(dates.len()),
                neg: Vec::with_capacity(dates.len()),
                neu: Vec::with_capacity(dates.len()),
                compound: Vec::with_capacity(dates.len()),
            };
            for date in &dates {
                let score = sorted
                    .binary_search_by_key(date, |r| r.date)
                    .map(|i| sorted[i].score)
                    .unwrap_or(SentimentScore::NEUTRAL);
                cols.pos.push(score.pos);
                cols.neg.push(score.neg);
                cols.neu.push(score.neu);
                cols.compound.push(score.compound);
            }
            Some(cols)
        }
    };

    let mut it = macro_cols.into_iter();
    let panel = AlignedPanel {
        ticker: prices.ticker().to_string(),
        dates,
        close,
        gold: it.next().unwrap(),
        brent: it.next().unwrap(),
        gsec: it.next().unwrap(),
        usd_inr: it.next().unwrap(),
        sentiment,
    };
    debug_assert!(panel.validate().is_ok());
    Ok(panel)
}
