use ndarray::{ArrayView1, ArrayView2, ArrayViewMut1, ArrayViewMut2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::NeuralError;

/// Activation of the hidden dense layers. The output layer is always linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenseActivation {
    #[default]
    Identity,
    Relu,
}

/// Stacked (optionally bidirectional) LSTM layers followed by a dense stack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmTopology {
    pub layer_sizes: Vec<usize>,
    pub dense_sizes: Vec<usize>,
    pub window: usize,
    pub bidirectional: bool,
    /// Inverted-dropout rate on LSTM layer outputs during training; 0 disables.
    #[serde(default)]
    pub dropout: f64,
    #[serde(default)]
    pub dense_activation: DenseActivation,
}

impl Default for LstmTopology {
    fn default() -> Self {
        Self {
            layer_sizes: vec![128, 64],
            dense_sizes: vec![25, 1],
            window: 60,
            bidirectional: false,
            dropout: 0.0,
            dense_activation: DenseActivation::Identity,
        }
    }
}

impl LstmTopology {
    pub fn validate(&self) -> Result<(), NeuralError> {
        let bad = |m: &str| Err(NeuralError::InvalidTopology(m.to_string()));
        if self.layer_sizes.is_empty() || self.layer_sizes.contains(&0) {
            return bad("LSTM layer sizes must be non-empty and >= 1");
        }
        if self.dense_sizes.is_empty() || self.dense_sizes.contains(&0) {
            return bad("dense sizes must be non-empty and >= 1");
        }
        if self.dense_sizes.last() != Some(&1) {
            return bad("last dense layer must have size 1");
        }
        if self.window == 0 {
            return bad("window must be >= 1");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("dropout must lie in [0, 1)");
        }
        Ok(())
    }

    pub fn directions(&self) -> usize {
        if self.bidirectional {
            2
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Slot {
    pub offset: usize,
    pub rows: usize,
    pub cols: usize,
}

impl Slot {
    fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn mat<'a>(&self, v: &'a [f64]) -> ArrayView2<'a, f64> {
        ArrayView2::from_shape(
            (self.rows, self.cols),
            &v[self.offset..self.offset + self.len()],
        )
        .expect("slot shape")
    }

    pub fn mat_mut<'a>(&self, v: &'a mut [f64]) -> ArrayViewMut2<'a, f64> {
        ArrayViewMut2::from_shape(
            (self.rows, self.cols),
            &mut v[self.offset..self.offset + self.len()],
        )
        .expect("slot shape")
    }

    pub fn vec<'a>(&self, v: &'a [f64]) -> ArrayView1<'a, f64> {
        ArrayView1::from(&v[self.offset..self.offset + self.len()])
    }

    pub fn vec_mut<'a>(&self, v: &'a mut [f64]) -> ArrayViewMut1<'a, f64> {
        ArrayViewMut1::from(&mut v[self.offset..self.offset + self.len()])
    }
}

/// Gate blocks are concatenated column-wise as [input, forget, cell, output].
#[derive(Debug, Clone, Copy)]
pub(crate) struct CellSlots {
    pub input: usize,
    pub hidden: usize,
    pub w_input: Slot,
    pub w_recurrent: Slot,
    pub bias: Slot,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct DenseSlots {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Slot,
    pub bias: Slot,
}

/// Offsets of every tensor inside the flat parameter vector.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    /// layer -> direction (forward first) -> cell
    pub cells: Vec<Vec<CellSlots>>,
    pub dense: Vec<DenseSlots>,
    pub total: usize,
}

impl Layout {
    pub fn new(topology: &LstmTopology) -> Self {
        let mut offset = 0;
        let mut slot = |rows: usize, cols: usize| {
            let s = Slot { offset, rows, cols };
            offset += rows * cols;
            s
        };
        let dirs = topology.directions();
        let mut cells = Vec::new();
        let mut input = 1;
        for &hidden in &topology.layer_sizes {
            let layer = (0..dirs)
                .map(|_| CellSlots {
                    input,
                    hidden,
                    w_input: slot(input, 4 * hidden),
                    w_recurrent: slot(hidden, 4 * hidden),
                    bias: slot(1, 4 * hidden),
                })
                .collect();
            cells.push(layer);
            input = hidden * dirs;
        }
        let mut dense = Vec::new();
        for &outputs in &topology.dense_sizes {
            dense.push(DenseSlots {
                inputs: input,
                outputs,
                weights: slot(input, outputs),
                bias: slot(1, outputs),
            });
            input = outputs;
        }
        Self {
            cells,
            dense,
            total: offset,
        }
    }
}

/// All network weights in one flat vector, addressed through [`Layout`].
#[derive(Debug, Clone)]
pub struct LstmParams {
    pub(crate) topology: LstmTopology,
    pub(crate) layout: Layout,
    pub(crate) values: Vec<f64>,
}

impl PartialEq for LstmParams {
    fn eq(&self, other: &Self) -> bool {
        self.topology == other.topology && self.values == other.values
    }
}

impl LstmParams {
    pub fn zeros(topology: &LstmTopology) -> Result<Self, NeuralError> {
        topology.validate()?;
        let layout = Layout::new(topology);
        Ok(Self {
            values: vec![0.0; layout.total],
            layout,
            topology: topology.clone(),
        })
    }

    pub fn from_values(topology: &LstmTopology, values: Vec<f64>) -> Result<Self, NeuralError> {
        let mut p = Self::zeros(topology)?;
        if values.len() != p.values.len() {
            return Err(NeuralError::ShapeMismatch(format!(
                "expected {} parameters, got {}",
                p.values.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(NeuralError::ShapeMismatch("non-finite parameter".into()));
        }
        p.values = values;
        Ok(p)
    }

    /// Xavier-uniform input and dense weights, uniform(±1/√H) recurrent
    /// weights, zero biases except forget-gate bias 1.
    pub fn init<R: Rng>(topology: &LstmTopology, rng: &mut R) -> Result<Self, NeuralError> {
        let mut p = Self::zeros(topology)?;
        let layout = p.layout.clone();
        let v = &mut p.values;
        let mut fill = |slot: Slot, limit: f64, v: &mut Vec<f64>| {
            for x in &mut v[slot.offset..slot.offset + slot.len()] {
                *x = rng.random_range(-limit..limit);
            }
        };
        for layer in &layout.cells {
            for cell in layer {
                let xavier = (6.0 / (cell.input + 4 * cell.hidden) as f64).sqrt();
                fill(cell.w_input, xavier, v);
                fill(cell.w_recurrent, 1.0 / (cell.hidden as f64).sqrt(), v);
                let b = cell.bias.offset;
                for x in &mut v[b + cell.hidden..b + 2 * cell.hidden] {
                    *x = 1.0;
                }
            }
        }
        for d in &layout.dense {
            fill(d.weights, (6.0 / (d.inputs + d.outputs) as f64).sqrt(), v);
        }
        Ok(p)
    }

    pub fn topology(&self) -> &LstmTopology {
        &self.topology
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Bias of the final (size-1) dense layer.
    pub fn output_bias_index(&self) -> usize {
        self.layout.dense.last().expect("dense stack").bias.offset
    }

    /// Named tensors as (name, offset, len), in layout order.
    pub fn tensor_names(&self) -> Vec<(String, usize, usize)> {
        let mut out = Vec::new();
        for (l, layer) in self.layout.cells.iter().enumerate() {
            for (d, c) in layer.iter().enumerate() {
                let dir = if d == 0 { "fwd" } else { "bwd" };
                for (name, s) in [
                    ("w_input", c.w_input),
                    ("w_recurrent", c.w_recurrent),
                    ("bias", c.bias),
                ] {
                    out.push((format!("lstm{l}.{dir}.{name}"), s.offset, s.len()));
                }
            }
        }
        for (k, d) in self.layout.dense.iter().enumerate() {
            out.push((
                format!("dense{k}.weights"),
                d.weights.offset,
                d.weights.len(),
            ));
            out.push((format!("dense{k}.bias"), d.bias.offset, d.bias.len()));
        }
        out
    }
}
