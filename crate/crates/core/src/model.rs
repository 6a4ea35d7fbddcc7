//! The seven model kinds behind one artifact type and one training entry
//! point, so every kind can be trained, persisted and walked forward the
//! same way.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical::{
    forest_predict, forest_train, window_schema, ArimaModel, ArimaSpec, ClassicalError,
    ClassicalModel, ClassicalModelArtifact, ForestConfig, KnnModel, LinearModel, TrendModel,
};
use crate::data::{AlignedPanel, TradingDate};
use crate::dataset::{build_feature_table, build_windows, DatasetError, MinMaxScaler, SplitSpec};
use crate::eval::{walk_forward, EvalError, History, OneStepForecaster, WalkForward};
use crate::neural::{lstm_train, LstmTopology, NeuralError, NeuralModelArtifact, TrainConfig};

pub const ARTIFACT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Lstm,
    Bilstm,
    Linreg,
    Arima,
    Knn,
    Additive,
    Forest,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        Self::Lstm,
        Self::Bilstm,
        Self::Linreg,
        Self::Arima,
        Self::Knn,
        Self::Additive,
        Self::Forest,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            Self::Lstm => "lstm",
            Self::Bilstm => "bilstm",
            Self::Linreg => "linreg",
            Self::Arima => "arima",
            Self::Knn => "knn",
            Self::Additive => "additive",
            Self::Forest => "forest",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Lstm => "LSTM",
            Self::Bilstm => "Bidirectional LSTM",
            Self::Linreg => "Linear Regression",
            Self::Arima => "Arima",
            Self::Knn => "KNN",
            Self::Additive => "Additive trend",
            Self::Forest => "Random Forest Regressor",
        }
    }

    /// Whether the model consumes sliding windows of closes.
    pub fn is_windowed(&self) -> bool {
        matches!(self, Self::Lstm | Self::Bilstm | Self::Linreg | Self::Knn)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error(
    "unknown model kind `{0}`; valid kinds: lstm, bilstm, linreg, arima, knn, additive, forest"
)]
pub struct UnknownModelKind(pub String);

impl FromStr for ModelKind {
    type Err = UnknownModelKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.key() == s)
            .ok_or_else(|| UnknownModelKind(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("artifact does not match the current data: {0}")]
    SchemaMismatch(String),
    #[error("unsupported artifact format version {0}")]
    FormatVersion(u32),
}

/// Hyperparameters for every kind. The window is shared by the windowed
/// kinds; topology windows are overridden with it.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSettings {
    pub window: usize,
    pub lstm: (LstmTopology, TrainConfig),
    pub bilstm: (LstmTopology, TrainConfig),
    pub forest: ForestConfig,
    pub arima: ArimaSpec,
}

impl Default for ModelSettings {
    fn default() -> Self {
        Self {
            window: 60,
            lstm: (LstmTopology::default(), TrainConfig::default()),
            bilstm: (
                LstmTopology {
                    bidirectional: true,
                    ..LstmTopology::default()
                },
                TrainConfig::default(),
            ),
            forest: ForestConfig::default(),
            arima: ArimaSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactMeta {
    pub ticker: String,
    pub kind: ModelKind,
    pub window: Option<usize>,
    /// First validation row of the panel the model was trained on.
    pub split_index: usize,
    pub train_end: TradingDate,
    pub panel_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelPayload {
    Neural(NeuralModelArtifact),
    Classical(ClassicalModelArtifact),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format_version: u32,
    pub meta: ArtifactMeta,
    pub payload: ModelPayload,
}

impl ModelArtifact {
    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Checks that this artifact was trained on `panel` split at
    /// `split_index` with the given window.
    pub fn check_schema(
        &self,
        panel: &AlignedPanel,
        split_index: usize,
        window: usize,
    ) -> Result<(), ModelError> {
        if self.format_version != ARTIFACT_FORMAT_VERSION {
            return Err(ModelError::FormatVersion(self.format_version));
        }
        let m = &self.meta;
        let mismatch = |what: String| Err(ModelError::SchemaMismatch(what));
        if m.ticker != panel.ticker {
            return mismatch(format!("ticker {} vs {}", m.ticker, panel.ticker));
        }
        if m.split_index != split_index {
            return mismatch(format!("split index {} vs {split_index}", m.split_index));
        }
        if m.kind.is_windowed() && m.window != Some(window) {
            return mismatch(format!("window {:?} vs {window}", m.window));
        }
        match panel.dates.get(split_index.wrapping_sub(1)) {
            Some(d) if *d == m.train_end => Ok(()),
            other => mismatch(format!("train end {} vs {:?}", m.train_end, other)),
        }
    }

    /// Walk-forward evaluation over every row from the split onward.
    pub fn evaluate(&self, panel: &AlignedPanel) -> Result<WalkForward, ModelError> {
        let dates = &panel.dates[self.meta.split_index..];
        Ok(walk_forward(self, panel, dates, self.meta.split_index)?)
    }
}

fn lag_windows(
    closes: &[f64],
    dates: &[TradingDate],
    window: usize,
    split: usize,
) -> Result<(Vec<Vec<f64>>, Vec<f64>), ModelError> {
    let ds = build_windows(closes, dates, window)?;
    let n = ds.samples_before(split);
    Ok((ds.inputs[..n].to_vec(), ds.targets[..n].to_vec()))
}

/// Fits `kind` on the rows of `panel` before `split.split_index`.
pub fn train_model(
    kind: ModelKind,
    panel: &AlignedPanel,
    split: &SplitSpec,
    settings: &ModelSettings,
) -> Result<ModelArtifact, ModelError> {
    let n_split = split.split_index;
    if split.n != panel.len() || n_split == 0 || n_split >= panel.len() {
        return Err(ModelError::SchemaMismatch(format!(
            "split {}/{} does not fit a panel of {} rows",
            n_split,
            split.n,
            panel.len()
        )));
    }
    let window = settings.window;
    let train_closes = &panel.close[..n_split];
    let payload = match kind {
        ModelKind::Lstm | ModelKind::Bilstm => {
            let (topology, config) = if kind == ModelKind::Lstm {
                &settings.lstm
            } else {
                &settings.bilstm
            };
            let topology = LstmTopology {
                window,
                bidirectional: kind == ModelKind::Bilstm,
                ..topology.clone()
            };
            let scaler = MinMaxScaler::fit_single(train_closes)?;
            let scaled = scaler.apply_all(0, &panel.close);
            let ds = build_windows(&scaled, &panel.dates, window)?;
            ModelPayload::Neural(lstm_train(&ds, split, &topology, config, &scaler)?)
        }
        ModelKind::Linreg => {
            let (x, y) = lag_windows(&panel.close, &panel.dates, window, n_split)?;
            let model = LinearModel::fit(&x, &y)?;
            ModelPayload::Classical(ClassicalModelArtifact::new(
                ClassicalModel::Linreg(model),
                window_schema(window),
                None,
            ))
        }
        ModelKind::Knn => {
            let (x, y) = lag_windows(&panel.close, &panel.dates, window, n_split)?;
            let model = KnnModel::fit_cv(x, y)?;
            ModelPayload::Classical(ClassicalModelArtifact::new(
                ClassicalModel::Knn(model),
                window_schema(window),
                None,
            ))
        }
        ModelKind::Arima => {
            let model = ArimaModel::fit(train_closes, &settings.arima)?;
            ModelPayload::Classical(ClassicalModelArtifact::new(
                ClassicalModel::Arima(model),
                vec!["close".into()],
                None,
            ))
        }
        ModelKind::Additive => {
            let model = TrendModel::fit(train_closes)?;
            ModelPayload::Classical(ClassicalModelArtifact::new(
                ClassicalModel::Additive(model),
                vec!["row".into()],
                None,
            ))
        }
        ModelKind::Forest => {
            let table = build_feature_table(panel)?;
            ModelPayload::Classical(forest_train(&table, split, &settings.forest)?)
        }
    };
    Ok(ModelArtifact {
        format_version: ARTIFACT_FORMAT_VERSION,
        meta: ArtifactMeta {
            ticker: panel.ticker.clone(),
            kind,
            window: kind.is_windowed().then_some(window),
            split_index: n_split,
            train_end: panel.dates[n_split - 1],
            panel_rows: panel.len(),
        },
        payload,
    })
}

fn model_err(e: impl fmt::Display) -> EvalError {
    EvalError::Model(e.to_string())
}

impl OneStepForecaster for ModelArtifact {
    fn predict_next(&self, history: &History<'_>) -> Result<f64, EvalError> {
        let recent = |w: usize| {
            history.recent_closes(w).ok_or_else(|| {
                EvalError::Model(format!("need {w} past closes, have {}", history.len()))
            })
        };
        match &self.payload {
            ModelPayload::Neural(a) => a
                .predict_next(recent(a.topology.window)?)
                .map_err(model_err),
            ModelPayload::Classical(a) => match &a.model {
                ClassicalModel::Linreg(m) => m
                    .predict(recent(a.feature_schema.len())?)
                    .map_err(model_err),
                ClassicalModel::Knn(m) => m
                    .predict(recent(a.feature_schema.len())?)
                    .map_err(model_err),
                ClassicalModel::Arima(m) => m.forecast_from(history.closes()).map_err(model_err),
                ClassicalModel::Additive(m) => Ok(m.predict(history.len())),
                ClassicalModel::Forest(_) => {
                    let row = history.len().checked_sub(1).ok_or_else(|| {
                        EvalError::Model("no feature row before the target".into())
                    })?;
                    let features = history.features(row)?.expect("row is inside the history");
                    forest_predict(a, &features).map_err(model_err)
                }
            },
        }
    }
}
