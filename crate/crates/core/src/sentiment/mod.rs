//! Headline preprocessing, lexicon-based intensity scoring, and daily
//! aggregation of news into one sentiment record per trading day.

mod daily;
pub mod lexicon;
mod preprocess;
pub mod scorer;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::TradingDate;

pub use daily::{Aggregation, DailySentiment, SentimentEngine};
pub use lexicon::{bundled_stopwords, parse_stopwords, Lexicon};
pub use preprocess::{preprocess_text, PreprocessConfig};
pub use scorer::score_text;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SentimentError {
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: u64, message: String },
    #[error("news dated {0} falls after the last trading day")]
    NewsAfterCalendarEnd(TradingDate),
    #[error("calendar is not strictly increasing at {0}")]
    UnorderedCalendar(TradingDate),
}

/// Positive, negative and neutral proportions plus the normalized compound
/// score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentScore {
    pub pos: f64,
    pub neg: f64,
    pub neu: f64,
    pub compound: f64,
}

impl SentimentScore {
    /// Score of empty text.
    pub const EMPTY: Self = Self {
        pos: 0.0,
        neg: 0.0,
        neu: 0.0,
        compound: 0.0,
    };

    /// Score of a day with no news, and of text without lexicon tokens.
    pub const NEUTRAL: Self = Self {
        pos: 0.0,
        neg: 0.0,
        neu: 1.0,
        compound: 0.0,
    };
}
