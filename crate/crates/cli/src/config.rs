use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use stockcast::classical::{ArimaSpec, ForestConfig};
use stockcast::data::FillPolicy;
use stockcast::model::{ModelKind, ModelSettings};
use stockcast::neural::{DenseActivation, LstmTopology, TrainConfig};
use stockcast::sentiment::{Aggregation, PreprocessConfig};

pub const WINDOW_RANGE: std::ops::RangeInclusive<usize> = 5..=250;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_out")]
    out: String,
    data: DataSection,
    #[serde(default)]
    sentiment: SentimentSection,
    dataset: DatasetSection,
    #[serde(default)]
    lstm: NeuralSection,
    #[serde(default)]
    bilstm: NeuralSection,
    #[serde(default)]
    forest: ForestSection,
    #[serde(default)]
    arima: ArimaSection,
    #[serde(default)]
    gridsearch: GridSection,
}

fn default_seed() -> u64 {
    42
}

fn default_out() -> String {
    "out".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DataSection {
    tickers: Vec<String>,
    news: String,
    lexicon: String,
    stopwords: String,
    #[serde(default)]
    fill_policy: FillPolicy,
    prices: BTreeMap<String, String>,
    #[serde(rename = "macro")]
    macro_files: MacroFiles,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MacroFiles {
    gold: String,
    brent: String,
    gsec: String,
    usd_inr: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SentimentSection {
    remove_stopwords: bool,
    remove_special_chars: bool,
    aggregation: Aggregation,
}

impl Default for SentimentSection {
    fn default() -> Self {
        let p = PreprocessConfig::default();
        Self {
            remove_stopwords: p.remove_stopwords,
            remove_special_chars: p.remove_special_chars,
            aggregation: Aggregation::default(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetSection {
    #[serde(default = "default_window")]
    window: usize,
    train_fraction: Option<f64>,
    split_index: Option<usize>,
}

fn default_window() -> usize {
    60
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct NeuralSection {
    layer_sizes: Vec<usize>,
    dense_sizes: Vec<usize>,
    dropout: f64,
    dense_activation: DenseActivation,
    epochs: usize,
    batch_size: usize,
    learning_rate: f64,
    patience: usize,
    gradient_clip: Option<f64>,
}

impl Default for NeuralSection {
    fn default() -> Self {
        let t = LstmTopology::default();
        let c = TrainConfig::default();
        Self {
            layer_sizes: t.layer_sizes,
            dense_sizes: t.dense_sizes,
            dropout: t.dropout,
            dense_activation: t.dense_activation,
            epochs: c.epochs,
            batch_size: c.batch_size,
            learning_rate: c.learning_rate,
            patience: c.early_stop_patience,
            gradient_clip: c.gradient_clip,
        }
    }
}

impl NeuralSection {
    fn build(&self, window: usize, bidirectional: bool, seed: u64) -> (LstmTopology, TrainConfig) {
        (
            LstmTopology {
                layer_sizes: self.layer_sizes.clone(),
                dense_sizes: self.dense_sizes.clone(),
                window,
                bidirectional,
                dropout: self.dropout,
                dense_activation: self.dense_activation,
            },
            TrainConfig {
                epochs: self.epochs,
                batch_size: self.batch_size,
                learning_rate: self.learning_rate,
                seed,
                early_stop_patience: self.patience,
                gradient_clip: self.gradient_clip,
            },
        )
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ForestSection {
    n_trees: usize,
    max_depth: Option<usize>,
    min_samples_leaf: usize,
    max_features: Option<usize>,
    bootstrap: bool,
}

impl Default for ForestSection {
    fn default() -> Self {
        let f = ForestConfig::default();
        Self {
            n_trees: f.n_trees,
            max_depth: f.max_depth,
            min_samples_leaf: f.min_samples_leaf,
            max_features: f.max_features,
            bootstrap: f.bootstrap,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ArimaSection {
    order: [usize; 3],
    seasonal_order: [usize; 4],
    max_evals: usize,
}

impl Default for ArimaSection {
    fn default() -> Self {
        let a = ArimaSpec::default();
        Self {
            order: [a.p, a.d, a.q],
            seasonal_order: [a.seasonal_p, a.seasonal_d, a.seasonal_q, a.period],
            max_evals: a.max_evals,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct GridSection {
    model: String,
    windows: Vec<usize>,
    epochs: Option<usize>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            model: "lstm".into(),
            windows: vec![5, 10, 20, 30, 60, 120, 250],
            epochs: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitChoice {
    Fraction(f64),
    Index(usize),
}

#[derive(Debug, Clone)]
pub struct GridSearch {
    pub model: ModelKind,
    pub windows: Vec<usize>,
    pub epochs: Option<usize>,
}

/// Validated configuration with paths resolved against the config file's
/// directory.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub digest: String,
    pub seed: u64,
    pub out: PathBuf,
    pub tickers: Vec<String>,
    pub prices: BTreeMap<String, PathBuf>,
    pub gold: PathBuf,
    pub brent: PathBuf,
    pub gsec: PathBuf,
    pub usd_inr: PathBuf,
    pub news: PathBuf,
    pub lexicon: PathBuf,
    pub stopwords: PathBuf,
    pub fill_policy: FillPolicy,
    pub preprocess: PreprocessConfig,
    pub aggregation: Aggregation,
    pub split: SplitChoice,
    pub settings: ModelSettings,
    pub gridsearch: GridSearch,
}

fn existing(base: &Path, key: &str, value: &str) -> Result<PathBuf> {
    let p = base.join(value);
    if !p.is_file() {
        bail!("config key `{key}`: file {} does not exist", p.display());
    }
    Ok(p)
}

impl RunConfig {
    /// Reads and validates `path`; `seed` and `out` override the file.
    pub fn load(path: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file: FileConfig =
            toml::from_str(&text).with_context(|| format!("{}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        let seed = seed.unwrap_or(file.seed);

        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        hasher.update(format!("\nseed={seed}\n").as_bytes());
        let digest: String = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();

        let d = &file.data;
        if d.tickers.is_empty() {
            bail!("config key `data.tickers`: no tickers configured");
        }
        let mut prices = BTreeMap::new();
        for t in &d.tickers {
            let Some(p) = d.prices.get(t) else {
                bail!("config key `data.prices.{t}`: missing price file for ticker {t}");
            };
            prices.insert(t.clone(), existing(&base, &format!("data.prices.{t}"), p)?);
        }

        let ds = &file.dataset;
        if !WINDOW_RANGE.contains(&ds.window) {
            bail!(
                "config key `dataset.window`: {} is outside [5, 250]",
                ds.window
            );
        }
        let split = match (ds.train_fraction, ds.split_index) {
            (Some(f), None) => SplitChoice::Fraction(f),
            (None, Some(i)) => SplitChoice::Index(i),
            _ => bail!(
                "config section `dataset`: set exactly one of `train_fraction` and `split_index`"
            ),
        };

        let a = &file.arima;
        let arima = ArimaSpec {
            p: a.order[0],
            d: a.order[1],
            q: a.order[2],
            seasonal_p: a.seasonal_order[0],
            seasonal_d: a.seasonal_order[1],
            seasonal_q: a.seasonal_order[2],
            period: a.seasonal_order[3],
            max_evals: a.max_evals,
        };
        let f = &file.forest;
        let settings = ModelSettings {
            window: ds.window,
            lstm: file.lstm.build(ds.window, false, seed),
            bilstm: file.bilstm.build(ds.window, true, seed),
            forest: ForestConfig {
                n_trees: f.n_trees,
                max_depth: f.max_depth,
                min_samples_leaf: f.min_samples_leaf,
                max_features: f.max_features,
                bootstrap: f.bootstrap,
                seed,
            },
            arima,
        };

        let g = &file.gridsearch;
        let model: ModelKind = g
            .model
            .parse()
            .map_err(|e| anyhow::anyhow!("config key `gridsearch.model`: {e}"))?;
        if !model.is_windowed() {
            bail!("config key `gridsearch.model`: {model} does not use a window");
        }
        if let Some(w) = g.windows.iter().find(|w| !WINDOW_RANGE.contains(w)) {
            bail!("config key `gridsearch.windows`: {w} is outside [5, 250]");
        }

        Ok(Self {
            digest,
            seed,
            out: out
                .map(Path::to_path_buf)
                .unwrap_or_else(|| base.join(&file.out)),
            tickers: d.tickers.clone(),
            prices,
            gold: existing(&base, "data.macro.gold", &d.macro_files.gold)?,
            brent: existing(&base, "data.macro.brent", &d.macro_files.brent)?,
            gsec: existing(&base, "data.macro.gsec", &d.macro_files.gsec)?,
            usd_inr: existing(&base, "data.macro.usd_inr", &d.macro_files.usd_inr)?,
            news: existing(&base, "data.news", &d.news)?,
            lexicon: existing(&base, "data.lexicon", &d.lexicon)?,
            stopwords: existing(&base, "data.stopwords", &d.stopwords)?,
            fill_policy: d.fill_policy,
            preprocess: PreprocessConfig {
                remove_stopwords: file.sentiment.remove_stopwords,
                remove_special_chars: file.sentiment.remove_special_chars,
            },
            aggregation: file.sentiment.aggregation,
            split,
            settings,
            gridsearch: GridSearch {
                model,
                windows: g.windows.clone(),
                epochs: g.epochs,
            },
        })
    }
}
