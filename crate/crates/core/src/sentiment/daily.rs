use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    preprocess_text, score_text, Lexicon, PreprocessConfig, SentimentError, SentimentScore,
};
use crate::data::TradingDate;
use crate::ingest::NewsItem;

/// Sentiment cloud for one trading day of one ticker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailySentiment {
    pub date: TradingDate,
    pub ticker: String,
    pub score: SentimentScore,
    pub headline_count: usize,
}

/// How a day's headlines are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Join headlines with `". "` and score the result once.
    #[default]
    Concatenate,
    /// Score each headline separately and average the four fields.
    MeanPerHeadline,
}

/// Lexicon, stopwords and preprocessing settings bundled for scoring news.
#[derive(Debug, Clone)]
pub struct SentimentEngine {
    pub lexicon: Lexicon,
    pub stopwords: HashSet<String>,
    pub preprocess: PreprocessConfig,
    pub aggregation: Aggregation,
}

impl SentimentEngine {
    pub fn new(lexicon: Lexicon, stopwords: HashSet<String>) -> Self {
        Self {
            lexicon,
            stopwords,
            preprocess: PreprocessConfig::default(),
            aggregation: Aggregation::default(),
        }
    }

    pub fn bundled() -> Self {
        Self::new(Lexicon::bundled(), super::lexicon::bundled_stopwords())
    }

    /// Preprocesses and scores one text.
    pub fn analyze(&self, raw: &str) -> SentimentScore {
        let text = preprocess_text(raw, self.preprocess, &self.stopwords, &self.lexicon);
        score_text(&text, &self.lexicon)
    }

    fn score_day(&self, headlines: &[&str]) -> SentimentScore {
        if headlines.is_empty() {
            return SentimentScore::NEUTRAL;
        }
        match self.aggregation {
            Aggregation::Concatenate => self.analyze(&headlines.join(". ")),
            Aggregation::MeanPerHeadline => {
                let n = headlines.len() as f64;
                let mut acc = SentimentScore::EMPTY;
                for h in headlines {
                    let s = self.analyze(h);
                    acc.pos += s.pos;
                    acc.neg += s.neg;
                    acc.neu += s.neu;
                    acc.compound += s.compound;
                }
                SentimentScore {
                    pos: acc.pos / n,
                    neg: acc.neg / n,
                    neu: acc.neu / n,
                    compound: acc.compound / n,
                }
            }
        }
    }

    /// One record per calendar date for `ticker`.
    ///
    /// News dated on a non-trading day counts towards the next trading day.
    /// Days without news get the neutral record with `headline_count` 0.
    pub fn aggregate_daily(
        &self,
        items: &[NewsItem],
        calendar: &[TradingDate],
        ticker: &str,
    ) -> Result<Vec<DailySentiment>, SentimentError> {
        if let Some(w) = calendar.windows(2).find(|w| w[0] >= w[1]) {
            return Err(SentimentError::UnorderedCalendar(w[1]));
        }
        let mut buckets: Vec<Vec<&str>> = vec![Vec::new(); calendar.len()];
        for item in items.iter().filter(|i| i.ticker == ticker) {
            let slot = calendar.partition_point(|d| *d < item.date);
            if slot == calendar.len() {
                return Err(SentimentError::NewsAfterCalendarEnd(item.date));
            }
            buckets[slot].push(item.headline.as_str());
        }
        // Days are independent; the parallel map preserves calendar order.
        Ok(calendar
            .par_iter()
            .zip(buckets.par_iter())
            .map(|(&date, headlines)| DailySentiment {
                date,
                ticker: ticker.to_string(),
                score: self.score_day(headlines),
                headline_count: headlines.len(),
            })
            .collect())
    }
}
