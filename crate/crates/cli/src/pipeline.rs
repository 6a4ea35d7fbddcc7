//! Loading, sentiment scoring and alignment shared by every command.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use log::{info, warn};

use stockcast::data::{
    align_panel, AlignedPanel, DatedSeries, MacroColumn, MacroPanel, PriceSeries,
};
use stockcast::dataset::{chronological_split, SplitSpec};
use stockcast::ingest::{parse_macro_csv, parse_news_file, parse_price_csv, NewsItem};
use stockcast::sentiment::{parse_stopwords, DailySentiment, Lexicon, SentimentEngine};

use crate::config::{RunConfig, SplitChoice};

pub fn read(stage: &str, path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("stage {stage}: {}", path.display()))
}

fn skipped(path: &Path, n: usize) {
    if n > 0 {
        warn!("{}: skipped {n} null rows", path.display());
    }
}

pub fn load_prices(cfg: &RunConfig, ticker: &str) -> Result<PriceSeries> {
    let path = &cfg.prices[ticker];
    let parsed = parse_price_csv(&read("ingest", path)?, ticker)
        .with_context(|| format!("stage ingest: {}", path.display()))?;
    skipped(path, parsed.skipped);
    Ok(parsed.value)
}

pub fn load_macro(cfg: &RunConfig) -> Result<MacroPanel> {
    let load = |path: &Path, column: MacroColumn| -> Result<DatedSeries> {
        let parsed = parse_macro_csv(&read("ingest", path)?, column)
            .with_context(|| format!("stage ingest: {}", path.display()))?;
        skipped(path, parsed.skipped);
        Ok(parsed.value)
    };
    MacroPanel::new(
        load(&cfg.gold, MacroColumn::Gold)?,
        load(&cfg.brent, MacroColumn::Brent)?,
        load(&cfg.gsec, MacroColumn::Gsec)?,
        load(&cfg.usd_inr, MacroColumn::UsdInr)?,
    )
    .context("stage ingest: macro files")
}

pub fn load_news(cfg: &RunConfig) -> Result<Vec<NewsItem>> {
    let parsed = parse_news_file(&read("ingest", &cfg.news)?, &cfg.tickers)
        .with_context(|| format!("stage ingest: {}", cfg.news.display()))?;
    skipped(&cfg.news, parsed.skipped);
    Ok(parsed.value)
}

pub fn load_engine(cfg: &RunConfig) -> Result<SentimentEngine> {
    let text = String::from_utf8(read("sentiment", &cfg.lexicon)?)
        .with_context(|| format!("stage sentiment: {}", cfg.lexicon.display()))?;
    let lexicon = Lexicon::parse(&text)
        .with_context(|| format!("stage sentiment: {}", cfg.lexicon.display()))?;
    let stop = String::from_utf8(read("sentiment", &cfg.stopwords)?)
        .with_context(|| format!("stage sentiment: {}", cfg.stopwords.display()))?;
    let mut engine = SentimentEngine::new(lexicon, parse_stopwords(&stop));
    engine.preprocess = cfg.preprocess;
    engine.aggregation = cfg.aggregation;
    Ok(engine)
}

/// Everything needed to build panels, loaded once per command.
pub struct Inputs {
    pub prices: BTreeMap<String, PriceSeries>,
    pub macro_panel: MacroPanel,
    pub news: Vec<NewsItem>,
    pub engine: SentimentEngine,
}

impl Inputs {
    pub fn load(cfg: &RunConfig, tickers: &[String]) -> Result<Self> {
        let mut prices = BTreeMap::new();
        for t in tickers {
            prices.insert(t.clone(), load_prices(cfg, t)?);
        }
        Ok(Self {
            prices,
            macro_panel: load_macro(cfg)?,
            news: load_news(cfg)?,
            engine: load_engine(cfg)?,
        })
    }

    pub fn sentiment(&self, cfg: &RunConfig, ticker: &str) -> Result<Vec<DailySentiment>> {
        let calendar = self.prices[ticker].dates();
        self.engine
            .aggregate_daily(&self.news, &calendar, ticker)
            .with_context(|| format!("stage sentiment: {} ({ticker})", cfg.news.display()))
    }

    pub fn panel(&self, cfg: &RunConfig, ticker: &str) -> Result<AlignedPanel> {
        let daily = self.sentiment(cfg, ticker)?;
        align_panel(
            &self.prices[ticker],
            &self.macro_panel,
            Some(&daily),
            cfg.fill_policy,
        )
        .with_context(|| format!("stage align: {ticker} against the macro files"))
    }
}

pub fn split_for(cfg: &RunConfig, panel: &AlignedPanel) -> Result<SplitSpec> {
    let n = panel.len();
    let split = match cfg.split {
        SplitChoice::Fraction(f) => chronological_split(n, f),
        SplitChoice::Index(i) => SplitSpec::at(n, i),
    };
    split.with_context(|| format!("stage dataset: splitting {} ({n} rows)", panel.ticker))
}

/// Panel and split per selected ticker.
pub fn prepare(cfg: &RunConfig, tickers: &[String]) -> Result<Vec<(AlignedPanel, SplitSpec)>> {
    let inputs = Inputs::load(cfg, tickers)?;
    let mut out = Vec::new();
    for t in tickers {
        let panel = inputs.panel(cfg, t)?;
        let split = split_for(cfg, &panel)?;
        if split.split_index <= cfg.settings.window {
            bail!(
                "stage dataset: {t} has {} training rows, fewer than the window {}",
                split.split_index,
                cfg.settings.window
            );
        }
        info!(
            "{t}: {} rows, train {} / validation {}",
            panel.len(),
            split.train_len(),
            split.validation_len()
        );
        out.push((panel, split));
    }
    Ok(out)
}
