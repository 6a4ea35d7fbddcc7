use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::artifact::NeuralModelArtifact;
use super::params::{LstmParams, LstmTopology};
use super::NeuralError;
use crate::dataset::{MinMaxScaler, SplitSpec, WindowedDataset};

const STREAM_INIT: u64 = 0;
const STREAM_SHUFFLE: u64 = 1;
const STREAM_DROPOUT: u64 = 2;

/// Rows per forward call when scoring whole slices.
const EVAL_CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub early_stop_patience: usize,
    /// Global L2-norm clip on each batch gradient.
    pub gradient_clip: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 32,
            learning_rate: 1e-3,
            seed: 42,
            early_stop_patience: 10,
            gradient_clip: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NeuralError> {
        let bad = |m: &str| Err(NeuralError::InvalidConfig(m.to_string()));
        if self.batch_size == 0 {
            return bad("batch_size must be >= 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if let Some(c) = self.gradient_clip {
            if !(c > 0.0) {
                return bad("gradient_clip must be positive");
            }
        }
        Ok(())
    }
}

/// Losses are in scaled units. Epoch 0 describes the initial parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_mse: f64,
    pub val_rmse: Option<f64>,
}

struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(n: usize, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

pub(crate) fn predict_scaled(
    params: &LstmParams,
    windows: &[&[f64]],
) -> Result<Vec<f64>, NeuralError> {
    let mut out = Vec::with_capacity(windows.len());
    for chunk in windows.chunks(EVAL_CHUNK) {
        out.extend(params.forward_batch(chunk)?);
    }
    Ok(out)
}

fn mse(params: &LstmParams, windows: &[&[f64]], targets: &[f64]) -> Result<f64, NeuralError> {
    let pred = predict_scaled(params, windows)?;
    let sum: f64 = pred
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(sum / targets.len() as f64)
}

fn clip(grad: &mut [f64], max_norm: f64) {
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if norm > max_norm {
        let s = max_norm / norm;
        grad.iter_mut().for_each(|g| *g *= s);
    }
}

/// Trains on samples whose target lies before `split.split_index` (a row of
/// the source series) and early-stops on the RMSE of the remaining samples.
///
/// Returns the parameters of the best monitored epoch. Without validation
/// samples the training MSE is monitored instead.
pub fn lstm_train(
    dataset: &WindowedDataset,
    split: &SplitSpec,
    topology: &LstmTopology,
    config: &TrainConfig,
    scaler: &MinMaxScaler,
) -> Result<NeuralModelArtifact, NeuralError> {
    topology.validate()?;
    config.validate()?;
    if dataset.window_len != topology.window {
        return Err(NeuralError::ShapeMismatch(format!(
            "dataset window {} vs topology window {}",
            dataset.window_len, topology.window
        )));
    }
    let n_train = dataset.samples_before(split.split_index);
    if n_train < config.batch_size || n_train == 0 {
        return Err(NeuralError::TooFewSamples(format!(
            "{n_train} training windows for batch size {}",
            config.batch_size
        )));
    }
    let windows: Vec<&[f64]> = dataset.inputs.iter().map(|w| w.as_slice()).collect();
    let (train_x, val_x) = windows.split_at(n_train);
    let (train_y, val_y) = dataset.targets.split_at(n_train);

    let master = ChaCha8Rng::seed_from_u64(config.seed);
    let stream = |s: u64| {
        let mut r = master.clone();
        r.set_stream(s);
        r
    };
    let mut params = LstmParams::init(topology, &mut stream(STREAM_INIT))?;
    let mut shuffle_rng = stream(STREAM_SHUFFLE);
    let mut dropout_rng = stream(STREAM_DROPOUT);

    let evaluate = |p: &LstmParams| -> Result<Option<f64>, NeuralError> {
        if val_x.is_empty() {
            Ok(None)
        } else {
            Ok(Some(mse(p, val_x, val_y)?.sqrt()))
        }
    };
    let monitored = |r: &EpochRecord| r.val_rmse.unwrap_or(r.train_mse.sqrt());

    let initial = EpochRecord {
        epoch: 0,
        train_mse: mse(&params, train_x, train_y)?,
        val_rmse: evaluate(&params)?,
    };
    if !monitored(&initial).is_finite() {
        return Err(NeuralError::DivergedLoss { epoch: 0 });
    }
    let mut history = vec![initial];
    let mut best = params.clone();
    let mut best_score = monitored(&initial);
    let mut best_epoch = 0;
    let mut adam = Adam::new(params.len(), config.learning_rate);
    let mut order: Vec<usize> = (0..n_train).collect();
    let use_dropout = topology.dropout > 0.0;

    for epoch in 1..=config.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(config.batch_size) {
            let xb: Vec<&[f64]> = batch.iter().map(|&i| train_x[i]).collect();
            let yb: Vec<f64> = batch.iter().map(|&i| train_y[i]).collect();
            let (loss, mut grad) =
                params.loss_and_gradient_with(&xb, &yb, use_dropout.then_some(&mut dropout_rng))?;
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(NeuralError::DivergedLoss { epoch });
            }
            if let Some(c) = config.gradient_clip {
                clip(&mut grad, c);
            }
            adam.step(params.values_mut(), &grad);
            loss_sum += loss * batch.len() as f64;
        }
        let record = EpochRecord {
            epoch,
            train_mse: loss_sum / n_train as f64,
            val_rmse: evaluate(&params)?,
        };
        let score = monitored(&record);
        if !score.is_finite() {
            return Err(NeuralError::DivergedLoss { epoch });
        }
        history.push(record);
        if score < best_score {
            best_score = score;
            best_epoch = epoch;
            best = params.clone();
        } else if epoch - best_epoch >= config.early_stop_patience {
            break;
        }
    }

    Ok(NeuralModelArtifact::new(
        &best,
        scaler.clone(),
        history,
        best_epoch,
        config.clone(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::TradingDate;
    use crate::dataset::build_windows;

    fn toy(n: usize, window: usize) -> (WindowedDataset, MinMaxScaler) {
        let raw: Vec<f64> = (0..n).map(|i| 10.0 + (i as f64 * 0.3).sin()).collect();
        let scaler = MinMaxScaler::fit_single(&raw[..n * 4 / 5]).unwrap();
        let scaled = scaler.apply_all(0, &raw);
        let start = TradingDate::from_ymd(2020, 1, 1).unwrap();
        let dates: Vec<TradingDate> = (0..n).map(|i| start.add_days(i as i64)).collect();
        (build_windows(&scaled, &dates, window).unwrap(), scaler)
    }

    fn small() -> LstmTopology {
        LstmTopology {
            layer_sizes: vec![4],
            dense_sizes: vec![3, 1],
            window: 6,
            ..LstmTopology::default()
        }
    }

    #[test]
    fn zero_epochs_keeps_initial_params() {
        let (ds, sc) = toy(60, 6);
        let split = SplitSpec::at(60, 48).unwrap();
        let cfg = TrainConfig {
            epochs: 0,
            batch_size: 8,
            ..TrainConfig::default()
        };
        let art = lstm_train(&ds, &split, &small(), &cfg, &sc).unwrap();
        let init = LstmParams::init(&small(), &mut {
            let mut r = ChaCha8Rng::seed_from_u64(42);
            r.set_stream(STREAM_INIT);
            r
        })
        .unwrap();
        assert_eq!(art.params().unwrap(), init);
        assert_eq!(art.history.len(), 1);
        assert_eq!(art.history[0].epoch, 0);
    }

    #[test]
    fn training_reduces_loss_and_is_deterministic() {
        let (ds, sc) = toy(120, 6);
        let split = SplitSpec::at(120, 100).unwrap();
        let cfg = TrainConfig {
            epochs: 30,
            batch_size: 8,
            learning_rate: 1e-2,
            ..TrainConfig::default()
        };
        let a = lstm_train(&ds, &split, &small(), &cfg, &sc).unwrap();
        let b = lstm_train(&ds, &split, &small(), &cfg, &sc).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let first = a.history[0].val_rmse.unwrap();
        let best = a.history[a.best_epoch].val_rmse.unwrap();
        assert!(best < first, "{best} !< {first}");
    }

    #[test]
    fn too_few_samples() {
        let (ds, sc) = toy(30, 6);
        let split = SplitSpec::at(30, 20).unwrap();
        let cfg = TrainConfig {
            batch_size: 32,
            ..TrainConfig::default()
        };
        assert!(matches!(
            lstm_train(&ds, &split, &small(), &cfg, &sc),
            Err(NeuralError::TooFewSamples(_))
        ));
    }

    #[test]
    fn huge_learning_rate_diverges_or_stays_finite() {
        let (ds, sc) = toy(80, 6);
        let split = SplitSpec::at(80, 64).unwrap();
        let cfg = TrainConfig {
            epochs: 3,
            batch_size: 8,
            learning_rate: 1e12,
            ..TrainConfig::default()
        };
        match lstm_train(&ds, &split, &small(), &cfg, &sc) {
            Ok(a) => assert!(a.history.iter().all(|r| r.train_mse.is_finite())),
            Err(e) => assert!(matches!(e, NeuralError::DivergedLoss { .. })),
        }
    }

    #[test]
    fn dropout_training_is_seeded() {
        let (ds, sc) = toy(80, 6);
        let split = SplitSpec::at(80, 64).unwrap();
        let topo = LstmTopology {
            dropout: 0.2,
            ..small()
        };
        let cfg = TrainConfig {
            epochs: 3,
            batch_size: 8,
            ..TrainConfig::default()
        };
        let a = lstm_train(&ds, &split, &topo, &cfg, &sc).unwrap();
        let b = lstm_train(&ds, &split, &topo, &cfg, &sc).unwrap();
        assert_eq!(a, b);
    }
}
