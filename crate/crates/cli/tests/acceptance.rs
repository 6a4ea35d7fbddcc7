//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always print.

#[path = "../../core/tests/support/oracles.rs"]
mod oracles;

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use oracles::{cart_dataset, cart_oracle, max_gradient_error, quick_settings, random_panel};
use stockcast::classical::arima::difference;
use stockcast::classical::{
    forest_train, ArimaCoefficients, ArimaModel, ArimaSpec, ForestConfig, RegressionTree,
    TreeConfig,
};
use stockcast::data::{AlignedPanel, SentimentColumns, TradingDate};
use stockcast::dataset::{build_feature_table, chronological_split};
use stockcast::eval::{mape, rmse};
use stockcast::model::{train_model, ModelKind, ModelSettings};
use stockcast::neural::LstmTopology;
use stockcast::sentiment::{score_text, Lexicon};

type Outcome = Result<String, String>;

fn gradient_oracle() -> Outcome {
    let topology = LstmTopology {
        layer_sizes: vec![4, 3],
        dense_sizes: vec![2, 1],
        window: 8,
        ..LstmTopology::default()
    };
    let start = Instant::now();
    let worst = (1..=3)
        .map(|seed| max_gradient_error(&topology, seed))
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    let detail = format!("max relative error {worst:.2e} over 3 seeds");
    if worst < 1e-4 && elapsed < Duration::from_secs(10) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn flat_panel(close: Vec<f64>) -> AlignedPanel {
    let n = close.len();
    let d0 = TradingDate::from_ymd(2000, 1, 3).unwrap();
    AlignedPanel {
        ticker: "SINE".into(),
        dates: (0..n).map(|i| d0.add_days(i as i64)).collect(),
        close,
        gold: vec![1.0; n],
        brent: vec![1.0; n],
        gsec: vec![1.0; n],
        usd_inr: vec![1.0; n],
        sentiment: Some(SentimentColumns {
            pos: vec![0.0; n],
            neg: vec![0.0; n],
            neu: vec![1.0; n],
            compound: vec![0.0; n],
        }),
    }
}

fn learning_check() -> Outcome {
    let close: Vec<f64> = (0..1000)
        .map(|i| {
            let t = i as f64;
            100.0 + 0.05 * t + 10.0 * (2.0 * std::f64::consts::PI * t / 50.0).sin()
        })
        .collect();
    let panel = flat_panel(close);
    let split = chronological_split(panel.len(), 0.95).map_err(|e| e.to_string())?;
    let settings = ModelSettings::default();
    let start = Instant::now();
    let artifact =
        train_model(ModelKind::Lstm, &panel, &split, &settings).map_err(|e| e.to_string())?;
    let metrics = artifact
        .evaluate(&panel)
        .map_err(|e| e.to_string())?
        .series
        .metrics;
    let elapsed = start.elapsed();
    let epochs = match &artifact.payload {
        stockcast::model::ModelPayload::Neural(a) => a.history.len() - 1,
        _ => unreachable!(),
    };
    let detail = format!(
        "validation MAPE {:.3}% after {epochs} epochs in {:.0} s",
        metrics.mape,
        elapsed.as_secs_f64()
    );
    if metrics.mape < 2.0 && epochs <= 200 && elapsed < Duration::from_secs(300) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cart_oracle_check() -> Outcome {
    let cases = 2000u32;
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let start = Instant::now();
    runner
        .run(&cart_dataset(), |(rows, y, depth)| {
            let mut expected = Vec::new();
            cart_oracle(&rows, &y, (0..y.len()).collect(), 0, depth, &mut expected);
            let xf: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| r.iter().map(|&v| v as f64).collect())
                .collect();
            let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
            let cfg = TreeConfig {
                max_depth: Some(depth),
                min_samples_leaf: 1,
                max_features: usize::MAX,
            };
            let sample: Vec<usize> = (0..y.len()).collect();
            let tree =
                RegressionTree::fit(&xf, &yf, &sample, &cfg, &mut ChaCha8Rng::seed_from_u64(0));
            prop_assert_eq!(tree.nodes, expected);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let detail = format!(
        "{cases} datasets match the exhaustive oracle in {:.2} s",
        elapsed.as_secs_f64()
    );
    if elapsed < Duration::from_secs(5) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sentiment_fixtures() -> Outcome {
    let lexicon = Lexicon::bundled();
    let text = include_str!("../../core/tests/fixtures/vader_fixtures.tsv");
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split('\t').collect();
        let want: Vec<f64> = f[1..].iter().map(|v| v.parse().unwrap()).collect();
        let s = score_text(f[0], &lexicon);
        for (g, w) in [s.pos, s.neg, s.neu, s.compound].iter().zip(&want) {
            worst = worst.max((g - w).abs());
        }
        if !f[0].trim().is_empty() && (s.pos + s.neg + s.neu - 1.0).abs() > 1e-9 {
            return Err(format!(
                "{:?}: proportions sum to {}",
                f[0],
                s.pos + s.neg + s.neu
            ));
        }
        n += 1;
    }
    let detail = format!("{n} sentences, max field error {worst:.1e}");
    if n >= 20 && worst < 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn arima_sanity() -> Outcome {
    let y: Vec<f64> = (0..90)
        .map(|i| 200.0 + (i as f64 * 0.45).sin() * 7.0 + (i % 12) as f64 * 1.3 + i as f64 * 0.2)
        .collect();
    let spec = ArimaSpec::default();
    let null =
        ArimaModel::with_coefficients(&y[..70], &spec, ArimaCoefficients::zeros(&spec), 0, true)
            .map_err(|e| e.to_string())?;
    for n in 70..=90 {
        let h = &y[..n];
        let got = null.forecast_from(h).map_err(|e| e.to_string())?;
        let want = h[n - 1] + h[n - 12] - h[n - 13];
        if got != want {
            return Err(format!(
                "null forecast at {n}: {got} vs differencing {want}"
            ));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let shocks: Vec<f64> = (0..501).map(|_| noise.sample(&mut rng)).collect();
    let mut series = vec![100.0];
    for t in 1..501 {
        series.push(series[t - 1] + shocks[t] + 0.5 * shocks[t - 1]);
    }
    let w = difference(&series, 1, 0, 1);
    let model =
        ArimaModel::fit(&series, &ArimaSpec::nonseasonal(0, 1, 1)).map_err(|e| e.to_string())?;
    let theta = model.coefficients.ma[0];
    let detail = format!(
        "null model matches differencing on 21 steps; MA(1) n={} theta-hat {theta:.4}",
        w.len()
    );
    if (0.35..=0.65).contains(&theta) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn leakage_audit() -> Outcome {
    let settings = quick_settings();
    let mut seeds = ChaCha8Rng::seed_from_u64(660);
    let mut checked = 0usize;
    for case in 0..100 {
        let seed: u64 = rand::Rng::random(&mut seeds);
        let n = 90 + (seed % 60) as usize;
        let panel = random_panel(seed, n);
        let split = chronological_split(n, 0.8).map_err(|e| e.to_string())?;
        let cut = split.split_index + (n - split.split_index) / 2;
        let mut scrambled = panel.clone();
        for r in cut..n {
            scrambled.close[r] *= 3.0;
            scrambled.gold[r] = 1.0;
            scrambled.sentiment.as_mut().unwrap().compound[r] = 0.5;
        }
        for kind in ModelKind::ALL {
            let artifact = train_model(kind, &panel, &split, &settings)
                .map_err(|e| format!("case {case} {kind}: {e}"))?;
            let wf = artifact
                .evaluate(&panel)
                .map_err(|e| format!("case {case} {kind}: {e}"))?;
            for &(target, max_read) in &wf.max_row_read {
                if max_read.is_some_and(|m| m >= target) {
                    return Err(format!(
                        "case {case} {kind}: target row {target} read row {max_read:?}"
                    ));
                }
                checked += 1;
            }
            let again = artifact.evaluate(&scrambled).map_err(|e| e.to_string())?;
            let keep = cut - split.split_index;
            if wf.series.predicted[..keep] != again.series.predicted[..keep] {
                return Err(format!(
                    "case {case} {kind}: later rows changed earlier forecasts"
                ));
            }
        }
    }
    Ok(format!(
        "100 panels x 7 models, {checked} forecasts read only earlier rows"
    ))
}

fn run_pipeline(config: &Path, out: &Path) -> Result<(), String> {
    for args in [
        &["--model", "all", "train"][..],
        &["--model", "all", "evaluate"][..],
    ] {
        let o = Command::new(env!("CARGO_BIN_EXE_stockcast"))
            .arg("--config")
            .arg(config)
            .arg("--out")
            .arg(out)
            .args(args)
            .env("RUST_LOG", "warn")
            .output()
            .map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(format!(
                "{args:?} failed: {}",
                String::from_utf8_lossy(&o.stderr)
            ));
        }
    }
    Ok(())
}

fn end_to_end(config: &Path, out: &Path) -> Outcome {
    let start = Instant::now();
    run_pipeline(config, out)?;
    let elapsed = start.elapsed();
    let md = fs::read_to_string(out.join("report/report.md")).map_err(|e| e.to_string())?;
    for section in [
        "## RMSE values for different models",
        "## Predicted and actual prices of stocks",
        "## RMSE values and MAPE for stock prices",
    ] {
        if !md.contains(section) {
            return Err(format!("report lacks {section:?}"));
        }
    }
    let csv = fs::read_to_string(out.join("report/metrics.csv")).map_err(|e| e.to_string())?;
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let finite = f[2..4]
            .iter()
            .all(|v| v.parse::<f64>().is_ok_and(f64::is_finite));
        if !finite {
            return Err(format!("non-finite metrics: {line}"));
        }
        rows += 1;
    }
    for t in ["RIL", "HDFCBANK", "TCS", "SBIN"] {
        for k in ModelKind::ALL {
            if !md.contains(&format!("| {} |", k.label())) || !csv.contains(&format!("{t},{k},")) {
                return Err(format!("missing {t} {k}"));
            }
        }
    }
    let detail = format!(
        "{rows} model rows, all finite, in {:.0} s",
        elapsed.as_secs_f64()
    );
    if rows == 28 && elapsed < Duration::from_secs(600) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(Result::ok)
                .map(|e| {
                    (
                        e.file_name().to_string_lossy().into_owned(),
                        fs::read(e.path()).unwrap(),
                    )
                })
                .collect()
        })
        .unwrap_or_default();
    out.sort();
    out
}

fn determinism(config: &Path, first: &Path, second: &Path) -> Outcome {
    run_pipeline(config, second)?;
    let a = files(&first.join("artifacts"));
    let b = files(&second.join("artifacts"));
    if a.len() != 28 || a != b {
        return Err(format!(
            "artifacts differ ({} vs {} files)",
            a.len(),
            b.len()
        ));
    }
    for name in ["metrics.csv", "report.md"] {
        let x = fs::read(first.join("report").join(name)).map_err(|e| e.to_string())?;
        let y = fs::read(second.join("report").join(name)).map_err(|e| e.to_string())?;
        if x != y {
            return Err(format!("{name} differs between runs"));
        }
    }

    let panel = random_panel(5, 300);
    let table = build_feature_table(&panel).map_err(|e| e.to_string())?;
    let split = chronological_split(panel.len(), 0.9).map_err(|e| e.to_string())?;
    let fit = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            forest_train(&table, &split, &ForestConfig::default())
                .unwrap()
                .to_json()
                .unwrap()
        })
    };
    if fit(1) != fit(4) {
        return Err("forest differs between 1 and 4 threads".into());
    }
    Ok("28 artifacts, metrics.csv and report.md byte-identical; forest identical on 1 and 4 threads".into())
}

fn metric_identities() -> Outcome {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    let r = rmse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 5.0]).map_err(|e| e.to_string())?;
    if !close(r, (4.0f64 / 3.0).sqrt()) {
        return Err(format!("rmse fixture {r}"));
    }
    let m = mape(&[98.0], &[100.0]).map_err(|e| e.to_string())?;
    if !close(m, 2.0) {
        return Err(format!("mape fixture {m}"));
    }
    let single = rmse(&[427.0], &[426.75]).map_err(|e| e.to_string())?;
    if !close(single, 0.25) {
        return Err(format!("single pair rmse {single}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let noise = Normal::new(500.0, 100.0).unwrap();
    for _ in 0..200 {
        let a: Vec<f64> = (0..50).map(|_| noise.sample(&mut rng)).collect();
        let p: Vec<f64> = (0..50).map(|_| noise.sample(&mut rng)).collect();
        if rmse(&a, &a) != Ok(0.0) || mape(&a, &a) != Ok(0.0) {
            return Err("identity failed".into());
        }
        let c = noise.sample(&mut rng);
        let base = rmse(&p, &a).unwrap();
        let shifted = rmse(
            &p.iter().map(|v| v + c).collect::<Vec<_>>(),
            &a.iter().map(|v| v + c).collect::<Vec<_>>(),
        )
        .unwrap();
        if (base - shifted).abs() > 1e-9 * base {
            return Err(format!("translation changed rmse {base} -> {shifted}"));
        }
    }
    Ok(format!(
        "sqrt(4/3) {r:.15}, 2% {m:.15}, identities and translation hold on 200 random pairs"
    ))
}

fn main() -> ExitCode {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let config = root.join("sample/config.toml");
    let tmp = tempfile::tempdir().unwrap();
    let (run_a, run_b) = (tmp.path().join("a"), tmp.path().join("b"));

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("gradient oracle", Box::new(gradient_oracle)),
        ("CART oracle", Box::new(cart_oracle_check)),
        ("sentiment fixtures", Box::new(sentiment_fixtures)),
        ("ARIMA sanity", Box::new(arima_sanity)),
        ("metric identities", Box::new(metric_identities)),
        ("leakage audit", Box::new(leakage_audit)),
        ("learning check", Box::new(learning_check)),
        ("end-to-end", Box::new(|| end_to_end(&config, &run_a))),
        (
            "determinism",
            Box::new(|| determinism(&config, &run_a, &run_b)),
        ),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name:<20} {secs:>7.1} s  {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name:<20} {secs:>7.1} s  {detail}");
            }
        }
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
