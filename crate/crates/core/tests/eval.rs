#[path = "support/oracles.rs"]
mod oracles;

use oracles::{quick_settings, random_panel};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use stockcast::data::PanelColumn;
use stockcast::dataset::{build_feature_table, build_windows, chronological_split};
use stockcast::eval::{
    correlation_matrix, mape, pearson, rmse, walk_forward, MetricSet, Persistence,
};
use stockcast::model::{train_model, ModelKind};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rmse_is_translation_invariant(
        pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..50),
        c in -1e3f64..1e3,
    ) {
        let (p, a): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let base = rmse(&p, &a).unwrap();
        let ps: Vec<f64> = p.iter().map(|v| v + c).collect();
        let as_: Vec<f64> = a.iter().map(|v| v + c).collect();
        prop_assert!((rmse(&ps, &as_).unwrap() - base).abs() <= 1e-9 * (1.0 + base));
        prop_assert!(base >= 0.0);
        prop_assert_eq!(rmse(&a, &a).unwrap(), 0.0);
        let max_abs = p.iter().zip(&a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let mean_abs = p.iter().zip(&a).map(|(x, y)| (x - y).abs()).sum::<f64>() / p.len() as f64;
        prop_assert!(base <= max_abs * (1.0 + 1e-12));
        prop_assert!(base >= mean_abs * (1.0 - 1e-12));
    }

    #[test]
    fn mape_is_scale_invariant(
        pairs in prop::collection::vec((1.0f64..1e3, 1.0f64..1e3), 1..50),
        k in 0.01f64..100.0,
    ) {
        let (p, a): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let base = mape(&p, &a).unwrap();
        let ps: Vec<f64> = p.iter().map(|v| v * k).collect();
        let as_: Vec<f64> = a.iter().map(|v| v * k).collect();
        prop_assert!((mape(&ps, &as_).unwrap() - base).abs() <= 1e-9 * (1.0 + base));
        prop_assert_eq!(mape(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(MetricSet::compute(&p, &a).unwrap().n, p.len());
    }

    #[test]
    fn samples_never_see_their_target(seed in any::<u64>(), window in 1usize..20) {
        let panel = random_panel(seed, 60);
        let ds = build_windows(&panel.close, &panel.dates, window).unwrap();
        for (k, &t) in ds.target_indices.iter().enumerate() {
            prop_assert_eq!(t, k + window);
            prop_assert!(panel.dates[k + window - 1] < ds.dates[k]);
        }
        prop_assert_eq!(ds.reconstruct(), panel.close.clone());
        let table = build_feature_table(&panel).unwrap();
        for (d, t) in table.dates.iter().zip(&table.target_dates) {
            prop_assert!(d < t);
        }
    }
}

#[test]
fn independent_noise_is_uncorrelated() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let x: Vec<f64> = (0..1000).map(|_| noise.sample(&mut rng)).collect();
    let y: Vec<f64> = (0..1000).map(|_| noise.sample(&mut rng)).collect();
    assert!(pearson(&x, &y).abs() < 0.1);
    let panel = random_panel(3, 200);
    let m = correlation_matrix(&panel, &PanelColumn::PRICE_AND_MACRO).unwrap();
    for i in 0..5 {
        assert_eq!(m.get(i, i), 1.0);
        for j in 0..5 {
            assert_eq!(m.get(i, j), m.get(j, i));
            assert!(m.get(i, j).abs() <= 1.0);
        }
    }
}

#[test]
fn persistence_walk_forward_is_shifted_actuals() {
    let panel = random_panel(11, 80);
    let wf = walk_forward(&Persistence, &panel, &panel.dates[70..], 70).unwrap();
    assert_eq!(wf.series.predicted, panel.close[69..79].to_vec());
    assert_eq!(wf.series.actual, panel.close[70..].to_vec());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// No model reads a row at or after its target, and scrambling later
    /// rows leaves earlier forecasts alone. Only the neural kinds, whose
    /// early stopping watches validation error, may depend on validation
    /// rows during training.
    #[test]
    fn models_do_not_look_ahead(seed in any::<u64>(), n in 90usize..140) {
        let panel = random_panel(seed, n);
        let split = chronological_split(n, 0.8).unwrap();
        let settings = quick_settings();
        let cut = split.split_index + (n - split.split_index) / 2;
        let mut scrambled = panel.clone();
        for r in cut..n {
            scrambled.close[r] *= 3.0;
            scrambled.gold[r] = 1.0;
            scrambled.sentiment.as_mut().unwrap().compound[r] = 0.5;
        }
        for kind in ModelKind::ALL {
            let artifact = train_model(kind, &panel, &split, &settings).unwrap();
            let wf = artifact.evaluate(&panel).unwrap();
            for &(target, max_read) in &wf.max_row_read {
                prop_assert!(max_read.is_none_or(|m| m < target), "{kind}: target {target} read {max_read:?}");
            }
            if !matches!(kind, ModelKind::Lstm | ModelKind::Bilstm) {
                let mut late = panel.clone();
                for r in split.split_index..n {
                    late.close[r] += 50.0;
                }
                let again = train_model(kind, &late, &split, &settings).unwrap();
                prop_assert_eq!(artifact.to_json().unwrap(), again.to_json().unwrap(), "{} training saw validation rows", kind);
            }
            let wf2 = artifact.evaluate(&scrambled).unwrap();
            let keep = cut - split.split_index;
            prop_assert_eq!(&wf.series.predicted[..keep], &wf2.series.predicted[..keep]);
        }
    }
}
