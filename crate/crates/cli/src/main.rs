mod commands;
mod config;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use stockcast::data::TradingDate;
use stockcast::model::ModelKind;

use config::RunConfig;

/// Next-day stock price forecasting: LSTM over price windows, a random
/// forest over news sentiment and macro features, and baselines.
#[derive(Parser)]
#[command(name = "stockcast", version)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, default_value = "config.toml")]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Model kind, or `all`.
    #[arg(long, global = true, default_value = "all", value_parser = parse_models)]
    model: Models,
    /// Ticker symbol, or `all`.
    #[arg(long, global = true, default_value = "all")]
    ticker: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse every input file and print a summary.
    IngestCheck,
    /// Write daily sentiment per ticker.
    Sentiment,
    /// Write the aligned panel per ticker and print dataset sizes.
    BuildDataset,
    /// Train and save model artifacts.
    Train,
    /// Walk-forward evaluation of saved artifacts, then write the report.
    Evaluate {
        /// Date for the predicted-vs-actual table.
        #[arg(long, value_parser = parse_date)]
        predict_date: Option<TradingDate>,
        /// Also write one SVG chart per series.
        #[arg(long)]
        svg: bool,
    },
    /// Rewrite the report from the last evaluation.
    Report {
        #[arg(long, value_parser = parse_date)]
        predict_date: Option<TradingDate>,
        #[arg(long)]
        svg: bool,
    },
    /// Train and evaluate the configured model over a range of windows.
    GridsearchWindow,
}

#[derive(Debug, Clone)]
struct Models(Vec<ModelKind>);

fn parse_models(s: &str) -> Result<Models, String> {
    if s == "all" {
        return Ok(Models(ModelKind::ALL.to_vec()));
    }
    s.parse::<ModelKind>()
        .map(|k| Models(vec![k]))
        .map_err(|e| format!("{e}, all"))
}

fn parse_date(s: &str) -> Result<TradingDate, String> {
    s.parse()
        .map_err(|e: stockcast::data::DateParseError| e.to_string())
}

fn tickers(cfg: &RunConfig, sel: &str) -> Result<Vec<String>> {
    if sel == "all" {
        return Ok(cfg.tickers.clone());
    }
    if !cfg.tickers.iter().any(|t| t == sel) {
        bail!(
            "unknown ticker `{sel}`; configured: {}, all",
            cfg.tickers.join(", ")
        );
    }
    Ok(vec![sel.to_string()])
}

fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::load(&cli.config, cli.seed, cli.out.as_deref())
        .map_err(|e| e.context("stage config"))?;
    let tickers = tickers(&cfg, &cli.ticker)?;
    let kinds = &cli.model.0;
    match cli.command {
        Command::IngestCheck => commands::ingest_check(&cfg, &tickers),
        Command::Sentiment => commands::sentiment(&cfg, &tickers),
        Command::BuildDataset => commands::build_dataset(&cfg, &tickers),
        Command::Train => commands::train(&cfg, &tickers, kinds),
        Command::Evaluate { predict_date, svg } => {
            commands::evaluate(&cfg, &tickers, kinds, predict_date, svg)
        }
        Command::Report { predict_date, svg } => commands::report(&cfg, predict_date, svg),
        Command::GridsearchWindow => commands::gridsearch(&cfg, &tickers),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
