use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::info;

use stockcast::data::{AlignedPanel, PanelColumn, TradingDate};
use stockcast::dataset::{build_feature_table, build_windows, SplitSpec};
use stockcast::eval::{
    correlation_matrix, emit_report, walk_forward, EmitOptions, ForecastReport, ReportEntry,
    ReportMetadata,
};
use stockcast::model::{train_model, ModelArtifact, ModelKind};

use crate::config::RunConfig;
use crate::pipeline::{self, prepare, Inputs};

pub fn artifact_path(out: &Path, ticker: &str, kind: ModelKind) -> PathBuf {
    out.join("artifacts").join(format!("{ticker}_{kind}.json"))
}

fn write(stage: &str, path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .with_context(|| format!("stage {stage}: creating {}", dir.display()))?;
    }
    fs::write(path, body).with_context(|| format!("stage {stage}: writing {}", path.display()))
}

pub fn ingest_check(cfg: &RunConfig, tickers: &[String]) -> Result<()> {
    let range = |d: &[TradingDate]| match (d.first(), d.last()) {
        (Some(a), Some(b)) => format!("{a}..{b}"),
        _ => "empty".into(),
    };
    for t in tickers {
        let s = pipeline::load_prices(cfg, t)?;
        println!(
            "{}: {} bars, {}",
            cfg.prices[t].display(),
            s.len(),
            range(&s.dates())
        );
    }
    let m = pipeline::load_macro(cfg)?;
    for (path, c) in [
        (&cfg.gold, stockcast::data::MacroColumn::Gold),
        (&cfg.brent, stockcast::data::MacroColumn::Brent),
        (&cfg.gsec, stockcast::data::MacroColumn::Gsec),
        (&cfg.usd_inr, stockcast::data::MacroColumn::UsdInr),
    ] {
        let s = m.series(c);
        println!(
            "{}: {} values, {}",
            path.display(),
            s.len(),
            range(s.dates())
        );
    }
    let news = pipeline::load_news(cfg)?;
    println!("{}: {} headlines", cfg.news.display(), news.len());
    let engine = pipeline::load_engine(cfg)?;
    println!("{}: {} tokens", cfg.lexicon.display(), engine.lexicon.len());
    Ok(())
}

pub fn sentiment(cfg: &RunConfig, tickers: &[String]) -> Result<()> {
    let inputs = Inputs::load(cfg, tickers)?;
    for t in tickers {
        let daily = inputs.sentiment(cfg, t)?;
        let mut csv = String::from("date,pos,neg,neu,compound,headline_count\n");
        for d in &daily {
            let s = d.score;
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                d.date, s.pos, s.neg, s.neu, s.compound, d.headline_count
            );
        }
        let path = cfg.out.join(format!("sentiment_{t}.csv"));
        write("sentiment", &path, &csv)?;
        let populated = daily.iter().filter(|d| d.headline_count > 0).count();
        println!(
            "{t}: {populated} of {} trading days with news -> {}",
            daily.len(),
            path.display()
        );
    }
    Ok(())
}

pub fn build_dataset(cfg: &RunConfig, tickers: &[String]) -> Result<()> {
    for (panel, split) in prepare(cfg, tickers)? {
        let t = &panel.ticker;
        let windows = build_windows(&panel.close, &panel.dates, cfg.settings.window)
            .with_context(|| format!("stage dataset: windows for {t}"))?;
        let table = build_feature_table(&panel)
            .with_context(|| format!("stage dataset: features for {t}"))?;
        let mut csv = String::from("date,close,gold,brent,gsec,usd_inr,pos,neg,neu,compound\n");
        let s = panel
            .sentiment
            .as_ref()
            .expect("panel built with sentiment");
        for i in 0..panel.len() {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{},{}",
                panel.dates[i],
                panel.close[i],
                panel.gold[i],
                panel.brent[i],
                panel.gsec[i],
                panel.usd_inr[i],
                s.pos[i],
                s.neg[i],
                s.neu[i],
                s.compound[i]
            );
        }
        let path = cfg.out.join("dataset").join(format!("panel_{t}.csv"));
        write("dataset", &path, &csv)?;
        println!(
            "{t}: {} rows, split at {} ({}), {} windows of {} ({} train), {} feature rows ({} train) -> {}",
            panel.len(),
            split.split_index,
            panel.dates[split.split_index],
            windows.len(),
            cfg.settings.window,
            windows.samples_before(split.split_index),
            table.len(),
            table.rows_before(split.split_index),
            path.display()
        );
    }
    Ok(())
}

/// One-step RMSE over the second half of the training rows.
fn in_sample_rmse(
    artifact: &ModelArtifact,
    panel: &AlignedPanel,
    split: &SplitSpec,
    window: usize,
) -> Result<f64> {
    let start = (split.split_index / 2).max(window).max(1);
    let wf = walk_forward(
        artifact,
        panel,
        &panel.dates[start..split.split_index],
        start,
    )?;
    Ok(wf.series.metrics.rmse)
}

pub fn train(cfg: &RunConfig, tickers: &[String], kinds: &[ModelKind]) -> Result<()> {
    for (panel, split) in prepare(cfg, tickers)? {
        let t = &panel.ticker;
        for &kind in kinds {
            info!("training {kind} on {t}");
            let artifact = train_model(kind, &panel, &split, &cfg.settings)
                .with_context(|| format!("stage train: {kind} on {t}"))?;
            let path = artifact_path(&cfg.out, t, kind);
            write("train", &path, &artifact.to_json()?)?;
            let val = artifact
                .evaluate(&panel)
                .with_context(|| format!("stage evaluate: {kind} on {t}"))?
                .series
                .metrics;
            let train = in_sample_rmse(&artifact, &panel, &split, cfg.settings.window)
                .with_context(|| format!("stage evaluate: {kind} on {t}"))?;
            println!(
                "{t} {kind}: train RMSE {train:.4}, validation RMSE {:.4} -> {}",
                val.rmse,
                path.display()
            );
        }
    }
    Ok(())
}

fn load_artifact(path: &Path) -> Result<ModelArtifact> {
    if !path.is_file() {
        bail!(
            "stage evaluate: missing artifact {} (run `train` first)",
            path.display()
        );
    }
    let text =
        fs::read_to_string(path).with_context(|| format!("stage evaluate: {}", path.display()))?;
    ModelArtifact::from_json(&text).with_context(|| format!("stage evaluate: {}", path.display()))
}

pub fn evaluation_path(out: &Path) -> PathBuf {
    out.join("evaluation.json")
}

fn check_prediction_date(report: &ForecastReport, date: TradingDate) -> Result<()> {
    for e in &report.entries {
        if !e.validation.dates.contains(&date) {
            bail!(
                "stage report: --predict-date {date} is not a validation date of {} {}",
                e.ticker,
                e.model
            );
        }
    }
    Ok(())
}

fn emit(cfg: &RunConfig, report: &ForecastReport, svg: bool) -> Result<()> {
    let dir = cfg.out.join("report");
    let files = emit_report(report, &dir, EmitOptions { svg })
        .with_context(|| "stage report".to_string())?;
    println!("wrote {} files to {}", files.len(), dir.display());
    Ok(())
}

pub fn evaluate(
    cfg: &RunConfig,
    tickers: &[String],
    kinds: &[ModelKind],
    predict_date: Option<TradingDate>,
    svg: bool,
) -> Result<()> {
    let mut report = ForecastReport {
        metadata: ReportMetadata {
            seed: cfg.seed,
            config_digest: cfg.digest.clone(),
            prediction_date: predict_date,
        },
        ..ForecastReport::default()
    };
    for (panel, split) in prepare(cfg, tickers)? {
        let t = &panel.ticker;
        for &kind in kinds {
            let path = artifact_path(&cfg.out, t, kind);
            let artifact = load_artifact(&path)?;
            artifact
                .check_schema(&panel, split.split_index, cfg.settings.window)
                .with_context(|| format!("stage evaluate: {}", path.display()))?;
            let wf = artifact
                .evaluate(&panel)
                .with_context(|| format!("stage evaluate: {}", path.display()))?;
            let m = wf.series.metrics;
            println!(
                "{t} {kind}: RMSE {:.4}, MAPE {:.4}%, n {}",
                m.rmse, m.mape, m.n
            );
            report.entries.push(ReportEntry {
                ticker: t.clone(),
                model: kind.key().to_string(),
                label: kind.label().to_string(),
                train_dates: panel.dates[..split.split_index].to_vec(),
                train_actual: panel.close[..split.split_index].to_vec(),
                validation: wf.series,
            });
        }
        let matrix = correlation_matrix(&panel, &PanelColumn::PRICE_AND_MACRO)
            .with_context(|| format!("stage evaluate: correlations for {t}"))?;
        report.correlations.push((t.clone(), matrix));
    }
    if let Some(d) = predict_date {
        check_prediction_date(&report, d)?;
    }
    let path = evaluation_path(&cfg.out);
    write("evaluate", &path, &serde_json::to_string_pretty(&report)?)?;
    emit(cfg, &report, svg)
}

pub fn report(cfg: &RunConfig, predict_date: Option<TradingDate>, svg: bool) -> Result<()> {
    let path = evaluation_path(&cfg.out);
    if !path.is_file() {
        bail!(
            "stage report: missing {} (run `evaluate` first)",
            path.display()
        );
    }
    let text =
        fs::read_to_string(&path).with_context(|| format!("stage report: {}", path.display()))?;
    let mut report: ForecastReport =
        serde_json::from_str(&text).with_context(|| format!("stage report: {}", path.display()))?;
    if let Some(d) = predict_date {
        check_prediction_date(&report, d)?;
        report.metadata.prediction_date = Some(d);
    }
    emit(cfg, &report, svg)
}

pub fn gridsearch(cfg: &RunConfig, tickers: &[String]) -> Result<()> {
    let g = &cfg.gridsearch;
    let prepared = prepare(cfg, tickers)?;
    let mut csv = String::from("ticker,model,window,rmse,mape,n\n");
    for (panel, split) in &prepared {
        let t = &panel.ticker;
        let mut best: Option<(usize, f64)> = None;
        for &w in &g.windows {
            if w >= split.split_index {
                bail!("stage gridsearch: window {w} leaves no training samples for {t}");
            }
            let mut settings = cfg.settings.clone();
            settings.window = w;
            if let Some(e) = g.epochs {
                settings.lstm.1.epochs = e;
                settings.bilstm.1.epochs = e;
            }
            let artifact = train_model(g.model, panel, split, &settings)
                .with_context(|| format!("stage gridsearch: {} on {t}, window {w}", g.model))?;
            let m = artifact.evaluate(panel)?.series.metrics;
            println!(
                "{t} {} W={w}: RMSE {:.4}, MAPE {:.4}%",
                g.model, m.rmse, m.mape
            );
            let _ = writeln!(csv, "{t},{},{w},{},{},{}", g.model, m.rmse, m.mape, m.n);
            if best.is_none_or(|(_, r)| m.rmse < r) {
                best = Some((w, m.rmse));
            }
        }
        if let Some((w, r)) = best {
            println!("{t}: best window {w} (RMSE {r:.4})");
        }
    }
    let path = cfg.out.join(format!("gridsearch_{}.csv", g.model));
    write("gridsearch", &path, &csv)?;
    println!("-> {}", path.display());
    Ok(())
}
