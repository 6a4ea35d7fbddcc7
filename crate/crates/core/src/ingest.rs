//! Parsers for the three input file families: per-ticker price CSV,
//! per-feature macro CSV, and the news headline CSV.
//!
//! All parsers take raw bytes and never panic; every failure carries the
//! 1-based line number of the offending record.

use std::collections::HashSet;
use std::fmt::Write as _;

use csv::{ByteRecord, ReaderBuilder};
use thiserror::Error;

use crate::data::{DatedSeries, MacroColumn, PriceBar, PriceSeries, TradingDate};

pub const PRICE_HEADER: [&str; 7] = [
    "Date",
    "Open",
    "High",
    "Low",
    "Close",
    "Adj Close",
    "Volume",
];
pub const MACRO_HEADER: [&str; 2] = ["Date", "Value"];
pub const NEWS_HEADER: [&str; 3] = ["Date", "Ticker", "Headline"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("input is empty")]
    EmptyFile,
    #[error("missing or malformed header (expected `{expected}`)")]
    MissingHeader { expected: String },
    #[error("line {line}, column {column}: {message}")]
    ParseError {
        line: u64,
        column: String,
        message: String,
    },
    #[error("duplicate date {date} (line {line})")]
    DuplicateDate { date: TradingDate, line: u64 },
    #[error("line {line}: unknown ticker `{symbol}`")]
    UnknownTicker { symbol: String, line: u64 },
}

/// Parsed value plus the number of data rows that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub value: T,
    pub skipped: usize,
}

/// A single news headline attributed to a ticker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewsItem {
    pub date: TradingDate,
    pub ticker: String,
    pub headline: String,
}

fn parse_err(line: u64, column: &str, message: impl Into<String>) -> IngestError {
    IngestError::ParseError {
        line,
        column: column.to_string(),
        message: message.into(),
    }
}

/// Iterates records with their line numbers after validating the header.
fn records<'a>(
    bytes: &'a [u8],
    header: &[&str],
) -> Result<impl Iterator<Item = Result<(u64, ByteRecord), IngestError>> + 'a, IngestError> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    if bytes.iter().all(|b| b.is_ascii_whitespace()) {
        return Err(IngestError::EmptyFile);
    }
    let reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);
    let mut iter = reader.into_byte_records();
    let expected = header.join(",");
    match iter.next() {
        Some(Ok(rec)) => {
            let ok = rec.len() == header.len()
                && rec
                    .iter()
                    .zip(header)
                    .all(|(got, want)| String::from_utf8_lossy(got).trim() == *want);
            if !ok {
                return Err(IngestError::MissingHeader { expected });
            }
        }
        _ => return Err(IngestError::MissingHeader { expected }),
    }
    let width = header.len();
    let columns: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    Ok(iter.map(move |r| {
        let rec = r.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, "<record>", e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != width {
            return Err(parse_err(
                line,
                &columns[0],
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        Ok((line, rec))
    }))
}

fn field<'r>(
    rec: &'r ByteRecord,
    idx: usize,
    line: u64,
    column: &str,
) -> Result<&'r str, IngestError> {
    std::str::from_utf8(&rec[idx])
        .map(str::trim)
        .map_err(|_| parse_err(line, column, "invalid UTF-8"))
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("null") || cell.eq_ignore_ascii_case("nan")
}

fn parse_date(cell: &str, line: u64) -> Result<TradingDate, IngestError> {
    cell.parse()
        .map_err(|e: crate::data::DateParseError| parse_err(line, "Date", e.to_string()))
}

fn parse_number(cell: &str, line: u64, column: &str) -> Result<f64, IngestError> {
    let v: f64 = cell
        .parse()
        .map_err(|_| parse_err(line, column, format!("not a number: `{cell}`")))?;
    if !v.is_finite() {
        return Err(parse_err(line, column, "non-finite value"));
    }
    Ok(v)
}

/// Sorts dated rows and rejects duplicates.
fn sort_unique<T>(
    mut rows: Vec<(TradingDate, u64, T)>,
) -> Result<Vec<(TradingDate, T)>, IngestError> {
    rows.sort_by_key(|(d, line, _)| (*d, *line));
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(IngestError::DuplicateDate {
                date: w[1].0,
                line: w[1].1,
            });
        }
    }
    Ok(rows.into_iter().map(|(d, _, v)| (d, v)).collect())
}

/// Parses a Yahoo-style daily price CSV.
///
/// Rows with an empty or `null` numeric cell are skipped and counted.
pub fn parse_price_csv(bytes: &[u8], ticker: &str) -> Result<Parsed<PriceSeries>, IngestError> {
    let mut rows = Vec::new();
    let mut skipped = 0;
    for item in records(bytes, &PRICE_HEADER)? {
        let (line, rec) = item?;
        let date = parse_date(field(&rec, 0, line, "Date")?, line)?;
        let mut cells = [""; 6];
        for (i, cell) in cells.iter_mut().enumerate() {
            *cell = field(&rec, i + 1, line, PRICE_HEADER[i + 1])?;
        }
        if cells.iter().any(|c| is_missing(c)) {
            skipped += 1;
            continue;
        }
        let mut nums = [0.0; 5];
        for (i, n) in nums.iter_mut().enumerate() {
            *n = parse_number(cells[i], line, PRICE_HEADER[i + 1])?;
        }
        let volume = parse_number(cells[5], line, "Volume")?;
        if volume < 0.0 || volume.fract() != 0.0 || volume > u64::MAX as f64 {
            return Err(parse_err(
                line,
                "Volume",
                "volume must be a non-negative integer",
            ));
        }
        let bar = PriceBar {
            date,
            open: nums[0],
            high: nums[1],
            low: nums[2],
            close: nums[3],
            adj_close: nums[4],
            volume: volume as u64,
        };
        if let Err(column) = bar.validate() {
            return Err(parse_err(
                line,
                column,
                "violates bar invariants (low <= open, close <= high; prices > 0)",
            ));
        }
        rows.push((date, line, bar));
    }
    let bars: Vec<PriceBar> = sort_unique(rows)?.into_iter().map(|(_, b)| b).collect();
    if bars.is_empty() && skipped == 0 {
        return Err(IngestError::EmptyFile);
    }
    let series = PriceSeries::new(ticker, bars).expect("rows validated above");
    Ok(Parsed {
        value: series,
        skipped,
    })
}

/// Renders a price series in the same format [`parse_price_csv`] reads.
pub fn write_price_csv(series: &PriceSeries) -> String {
    let mut out = PRICE_HEADER.join(",");
    out.push('\n');
    for b in series.bars() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            b.date, b.open, b.high, b.low, b.close, b.adj_close, b.volume
        );
    }
    out
}

/// Parses a `Date,Value` macro CSV for one feature.
pub fn parse_macro_csv(
    bytes: &[u8],
    column: MacroColumn,
) -> Result<Parsed<DatedSeries>, IngestError> {
    let mut rows = Vec::new();
    let mut skipped = 0;
    for item in records(bytes, &MACRO_HEADER)? {
        let (line, rec) = item?;
        let date = parse_date(field(&rec, 0, line, "Date")?, line)?;
        let cell = field(&rec, 1, line, "Value")?;
        if is_missing(cell) {
            skipped += 1;
            continue;
        }
        let v = parse_number(cell, line, "Value")?;
        if !column.accepts(v) {
            return Err(parse_err(
                line,
                "Value",
                format!("{column} must be positive, got {v}"),
            ));
        }
        rows.push((date, line, v));
    }
    let rows = sort_unique(rows)?;
    if rows.is_empty() && skipped == 0 {
        return Err(IngestError::EmptyFile);
    }
    let (dates, values) = rows.into_iter().unzip();
    Ok(Parsed {
        value: DatedSeries::new(dates, values).expect("sorted and unique"),
        skipped,
    })
}

/// Renders a macro series as `Date,Value` CSV.
pub fn write_macro_csv(series: &DatedSeries) -> String {
    let mut out = MACRO_HEADER.join(",");
    out.push('\n');
    for (d, v) in series.dates().iter().zip(series.values()) {
        let _ = writeln!(out, "{d},{v}");
    }
    out
}

/// Parses the `Date,Ticker,Headline` news CSV. File order is preserved.
///
/// Rows whose headline is blank after trimming are skipped and counted.
pub fn parse_news_file(
    bytes: &[u8],
    universe: &[String],
) -> Result<Parsed<Vec<NewsItem>>, IngestError> {
    let known: HashSet<&str> = universe.iter().map(String::as_str).collect();
    let mut items = Vec::new();
    let mut skipped = 0;
    for item in records(bytes, &NEWS_HEADER)? {
        let (line, rec) = item?;
        let date = parse_date(field(&rec, 0, line, "Date")?, line)?;
        let ticker = field(&rec, 1, line, "Ticker")?;
        if !known.contains(ticker) {
            return Err(IngestError::UnknownTicker {
                symbol: ticker.to_string(),
                line,
            });
        }
        let headline = field(&rec, 2, line, "Headline")?;
        if headline.is_empty() {
            skipped += 1;
            continue;
        }
        items.push(NewsItem {
            date,
            ticker: ticker.to_string(),
            headline: headline.to_string(),
        });
    }
    Ok(Parsed {
        value: items,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str = "Date,Open,High,Low,Close,Adj Close,Volume\n";

    #[test]
    fn parses_single_row() {
        let csv = format!("{HEADER}2021-06-28,2098,2110,2080,2086,2086,5000000\n");
        let parsed = parse_price_csv(csv.as_bytes(), "RIL").unwrap();
        assert_eq!(parsed.skipped, 0);
        let bar = &parsed.value.bars()[0];
        assert_eq!(bar.close, 2086.0);
        assert_eq!(bar.volume, 5_000_000);
        assert_eq!(parsed.value.ticker(), "RIL");
    }

    #[test]
    fn empty_input_is_empty_file() {
        assert_eq!(
            parse_price_csv(b"", "RIL").unwrap_err(),
            IngestError::EmptyFile
        );
        assert_eq!(
            parse_price_csv(b"  \n", "RIL").unwrap_err(),
            IngestError::EmptyFile
        );
        assert_eq!(
            parse_price_csv(HEADER.as_bytes(), "RIL").unwrap_err(),
            IngestError::EmptyFile
        );
    }

    #[test]
    fn bad_close_reports_line_and_column() {
        let mut csv = String::from(HEADER);
        for day in 1..=5 {
            csv.push_str(&format!("2021-06-0{day},10,11,9,10,10,1\n"));
        }
        csv.push_str("2021-06-07,10,11,9,abc,10,1\n");
        let err = parse_price_csv(csv.as_bytes(), "RIL").unwrap_err();
        match err {
            IngestError::ParseError { line, column, .. } => {
                assert_eq!(line, 7);
                assert_eq!(column, "Close");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn null_rows_are_skipped_and_counted() {
        let csv = format!("{HEADER}2021-06-01,10,11,9,10,10,1\n2021-06-02,null,null,null,null,null,null\n2021-06-03,,11,9,10,10,1\n");
        let parsed = parse_price_csv(csv.as_bytes(), "RIL").unwrap();
        assert_eq!(parsed.value.len(), 1);
        assert_eq!(parsed.skipped, 2);
    }

    #[test]
    fn missing_header_and_duplicates() {
        let err = parse_price_csv(b"2021-06-01,10,11,9,10,10,1\n", "RIL").unwrap_err();
        assert!(matches!(err, IngestError::MissingHeader { .. }));
        let csv = format!("{HEADER}2021-06-01,10,11,9,10,10,1\n2021-06-01,10,11,9,10,10,1\n");
        let err = parse_price_csv(csv.as_bytes(), "RIL").unwrap_err();
        assert!(matches!(err, IngestError::DuplicateDate { line: 3, .. }));
    }

    #[test]
    fn locale_dates_are_rejected() {
        let csv = format!("{HEADER}06/01/2021,10,11,9,10,10,1\n");
        assert!(matches!(
            parse_price_csv(csv.as_bytes(), "RIL").unwrap_err(),
            IngestError::ParseError { line: 2, .. }
        ));
    }

    #[test]
    fn bar_invariants_enforced() {
        let csv = format!("{HEADER}2021-06-01,10,11,9,12,12,1\n");
        let err = parse_price_csv(csv.as_bytes(), "RIL").unwrap_err();
        assert!(matches!(err, IngestError::ParseError { ref column, .. } if column == "Close"));
    }

    #[test]
    fn macro_rows_are_sorted() {
        let csv = "Date,Value\n2021-06-02,1780.5\n2021-06-01,1771.0\n";
        let parsed = parse_macro_csv(csv.as_bytes(), MacroColumn::Gold).unwrap();
        assert_eq!(parsed.value.values(), &[1771.0, 1780.5]);
        assert!(parsed.value.dates()[0] < parsed.value.dates()[1]);
    }

    #[test]
    fn negative_gold_rejected_but_negative_yield_allowed() {
        let csv = "Date,Value\n2021-06-01,-1.0\n";
        assert!(matches!(
            parse_macro_csv(csv.as_bytes(), MacroColumn::Gold).unwrap_err(),
            IngestError::ParseError { line: 2, .. }
        ));
        assert!(parse_macro_csv(csv.as_bytes(), MacroColumn::Gsec).is_ok());
    }

    #[test]
    fn long_macro_history_parses() {
        // 3,620 observations thinned from weekdays between 2006-12-29 and 2021-06-28.
        let start = TradingDate::from_ymd(2006, 12, 29).unwrap();
        let end = TradingDate::from_ymd(2021, 6, 28).unwrap();
        let mut weekdays = Vec::new();
        let mut d = start;
        while d <= end {
            if d.weekday_index() < 5 {
                weekdays.push(d);
            }
            d = d.succ();
        }
        let n = 3620;
        assert!(weekdays.len() > n);
        let picked: Vec<TradingDate> = (0..n)
            .map(|i| weekdays[i * (weekdays.len() - 1) / (n - 1)])
            .collect();
        let values: Vec<f64> = (0..n).map(|i| 600.0 + 0.37 * i as f64).collect();
        let series = DatedSeries::new(picked.clone(), values).unwrap();
        let text = write_macro_csv(&series);
        let parsed = parse_macro_csv(text.as_bytes(), MacroColumn::Gold).unwrap();
        assert_eq!(parsed.value.len(), 3620);
        assert_eq!(parsed.value.dates()[0], start);
        assert_eq!(*parsed.value.dates().last().unwrap(), end);
        assert_eq!(parsed.value, series);
    }

    fn universe() -> Vec<String> {
        vec!["RIL".into(), "TCS".into()]
    }

    #[test]
    fn news_preserves_order_and_quoting() {
        let csv = "Date,Ticker,Headline\n2021-06-01,RIL,First\n2021-06-01,RIL,\"RIL, Q4 results beat\"\n2021-06-01,RIL,Third\n";
        let parsed = parse_news_file(csv.as_bytes(), &universe()).unwrap();
        let heads: Vec<_> = parsed.value.iter().map(|n| n.headline.as_str()).collect();
        assert_eq!(heads, ["First", "RIL, Q4 results beat", "Third"]);
    }

    #[test]
    fn blank_headline_skipped_unknown_ticker_rejected() {
        let csv = "Date,Ticker,Headline\n2021-06-01,RIL,   \n2021-06-01,TCS,ok\n";
        let parsed = parse_news_file(csv.as_bytes(), &universe()).unwrap();
        assert_eq!(parsed.skipped, 1);
        assert_eq!(parsed.value.len(), 1);
        let csv = "Date,Ticker,Headline\n2021-06-01,XYZ,hello\n";
        assert_eq!(
            parse_news_file(csv.as_bytes(), &universe()).unwrap_err(),
            IngestError::UnknownTicker {
                symbol: "XYZ".into(),
                line: 2
            }
        );
    }

    fn arb_bar() -> impl Strategy<Value = (f64, f64, f64, f64, u64)> {
        (
            1.0f64..5000.0,
            0.0f64..1.0,
            0.0f64..1.0,
            0.0f64..50.0,
            0u64..1_000_000_000,
        )
            .prop_map(|(low, a, b, span, vol)| {
                let high = low + span;
                (low + a * span, high, low, low + b * span, vol)
            })
    }

    proptest! {
        #[test]
        fn price_csv_round_trips(rows in prop::collection::vec(arb_bar(), 1..40)) {
            let start = TradingDate::from_ymd(2019, 6, 3).unwrap();
            let bars: Vec<PriceBar> = rows.iter().enumerate().map(|(i, &(open, high, low, close, volume))| PriceBar {
                date: start.add_days(i as i64),
                open, high, low, close, adj_close: close, volume,
            }).collect();
            let series = PriceSeries::new("SBIN", bars).unwrap();
            let text = write_price_csv(&series);
            let back = parse_price_csv(text.as_bytes(), "SBIN").unwrap();
            prop_assert_eq!(back.skipped, 0);
            prop_assert_eq!(back.value, series);
        }

        #[test]
        fn parsers_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..400)) {
            let _ = parse_price_csv(&bytes, "X");
            let _ = parse_macro_csv(&bytes, MacroColumn::Brent);
            let _ = parse_news_file(&bytes, &["X".to_string()]);
            let mut with_header = b"Date,Open,High,Low,Close,Adj Close,Volume\n".to_vec();
            with_header.extend_from_slice(&bytes);
            if let Err(e) = parse_price_csv(&with_header, "X") {
                if let IngestError::ParseError { line, .. } = e {
                    prop_assert!(line >= 2);
                }
            }
        }
    }
}
