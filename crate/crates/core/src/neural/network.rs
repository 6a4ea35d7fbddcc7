//! Batched forward pass and backpropagation through time.
//!
//! Sequences are stored time-major: a `(T * B) x D` matrix whose row block
//! `t` holds the `B` samples at time step `t`.

use ndarray::linalg::general_mat_mul;
use ndarray::{concatenate, s, Array1, Array2, ArrayView2, Axis};
use rand::Rng;

use super::params::{CellSlots, DenseActivation, DenseSlots, LstmParams};
use super::NeuralError;

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

struct CellTrace {
    reverse: bool,
    /// Input sequence, time-major.
    xs: Array2<f64>,
    /// Gate activations [i, f, g, o], time-major.
    gates: Array2<f64>,
    /// Hidden state entering each time step, time-major.
    h_prev: Array2<f64>,
    /// Cell state entering each time step.
    c_prev: Array2<f64>,
    /// tanh of the cell state leaving each time step.
    tanh_c: Array2<f64>,
    /// Hidden state leaving each time step.
    hs: Array2<f64>,
}

fn cell_forward(
    values: &[f64],
    cell: &CellSlots,
    xs: Array2<f64>,
    steps: usize,
    batch: usize,
    reverse: bool,
) -> CellTrace {
    let h = cell.hidden;
    let w_in = cell.w_input.mat(values);
    let w_rec = cell.w_recurrent.mat(values);
    let bias = cell.bias.vec(values);

    let mut gates = xs.dot(&w_in);
    gates += &bias;
    let rows = steps * batch;
    let mut h_prev = Array2::<f64>::zeros((rows, h));
    let mut c_prev = Array2::<f64>::zeros((rows, h));
    let mut tanh_c = Array2::<f64>::zeros((rows, h));
    let mut hs = Array2::<f64>::zeros((rows, h));

    let mut h_state = Array2::<f64>::zeros((batch, h));
    let mut c_state = Array2::<f64>::zeros((batch, h));
    for step in 0..steps {
        let t = if reverse { steps - 1 - step } else { step };
        let block = s![t * batch..(t + 1) * batch, ..];
        h_prev.slice_mut(block).assign(&h_state);
        c_prev.slice_mut(block).assign(&c_state);
        let mut z = gates.slice_mut(block);
        general_mat_mul(1.0, &h_state, &w_rec, 1.0, &mut z);
        let mut tc = tanh_c.slice_mut(block);
        for b in 0..batch {
            for j in 0..h {
                let i_g = sigmoid(z[[b, j]]);
                let f_g = sigmoid(z[[b, h + j]]);
                let g_g = z[[b, 2 * h + j]].tanh();
                let o_g = sigmoid(z[[b, 3 * h + j]]);
                z[[b, j]] = i_g;
                z[[b, h + j]] = f_g;
                z[[b, 2 * h + j]] = g_g;
                z[[b, 3 * h + j]] = o_g;
                let c = f_g * c_state[[b, j]] + i_g * g_g;
                let t_c = c.tanh();
                c_state[[b, j]] = c;
                tc[[b, j]] = t_c;
                h_state[[b, j]] = o_g * t_c;
            }
        }
        hs.slice_mut(block).assign(&h_state);
    }
    CellTrace {
        reverse,
        xs,
        gates,
        h_prev,
        c_prev,
        tanh_c,
        hs,
    }
}

/// Backpropagates `d_hs` (gradient w.r.t. every emitted hidden state,
/// time-major) through one cell. Accumulates parameter gradients into
/// `grad` and returns the gradient w.r.t. the input sequence.
fn cell_backward(
    values: &[f64],
    grad: &mut [f64],
    cell: &CellSlots,
    trace: &CellTrace,
    d_hs: &Array2<f64>,
    steps: usize,
    batch: usize,
    need_input_grad: bool,
) -> Option<Array2<f64>> {
    let h = cell.hidden;
    let w_in = cell.w_input.mat(values);
    let w_rec = cell.w_recurrent.mat(values);
    let mut dz = Array2::<f64>::zeros((steps * batch, 4 * h));
    let mut dh_next = Array2::<f64>::zeros((batch, h));
    let mut dc_next = Array2::<f64>::zeros((batch, h));
    for step in (0..steps).rev() {
        let t = if trace.reverse {
            steps - 1 - step
        } else {
            step
        };
        let block = s![t * batch..(t + 1) * batch, ..];
        let gates = trace.gates.slice(block);
        let c_prev = trace.c_prev.slice(block);
        let tanh_c = trace.tanh_c.slice(block);
        let d_ext = d_hs.slice(block);
        let mut dz_t = dz.slice_mut(block);
        for b in 0..batch {
            for j in 0..h {
                let i_g = gates[[b, j]];
                let f_g = gates[[b, h + j]];
                let g_g = gates[[b, 2 * h + j]];
                let o_g = gates[[b, 3 * h + j]];
                let t_c = tanh_c[[b, j]];
                let dh = d_ext[[b, j]] + dh_next[[b, j]];
                let dc = dh * o_g * (1.0 - t_c * t_c) + dc_next[[b, j]];
                dz_t[[b, j]] = dc * g_g * i_g * (1.0 - i_g);
                dz_t[[b, h + j]] = dc * c_prev[[b, j]] * f_g * (1.0 - f_g);
                dz_t[[b, 2 * h + j]] = dc * i_g * (1.0 - g_g * g_g);
                dz_t[[b, 3 * h + j]] = dh * t_c * o_g * (1.0 - o_g);
                dc_next[[b, j]] = dc * f_g;
            }
        }
        general_mat_mul(1.0, &dz_t, &w_rec.t(), 0.0, &mut dh_next);
    }
    {
        let mut g = cell.w_input.mat_mut(grad);
        general_mat_mul(1.0, &trace.xs.t(), &dz, 1.0, &mut g);
    }
    {
        let mut g = cell.w_recurrent.mat_mut(grad);
        general_mat_mul(1.0, &trace.h_prev.t(), &dz, 1.0, &mut g);
    }
    {
        let mut g = cell.bias.vec_mut(grad);
        g += &dz.sum_axis(Axis(0));
    }
    need_input_grad.then(|| dz.dot(&w_in.t()))
}

struct LayerTrace {
    cells: Vec<CellTrace>,
    /// Dropout multipliers applied to the layer output, if any.
    mask: Option<Array2<f64>>,
}

struct DenseTrace {
    /// Input to each dense layer.
    inputs: Vec<Array2<f64>>,
    /// Pre-activation of each dense layer.
    pre: Vec<Array2<f64>>,
}

pub(crate) struct ForwardTrace {
    layers: Vec<LayerTrace>,
    dense: DenseTrace,
    pub output: Array1<f64>,
}

fn dense_forward(
    values: &[f64],
    dense: &[DenseSlots],
    activation: DenseActivation,
    input: Array2<f64>,
) -> (DenseTrace, Array1<f64>) {
    let mut inputs = Vec::with_capacity(dense.len());
    let mut pre = Vec::with_capacity(dense.len());
    let mut a = input;
    for (k, d) in dense.iter().enumerate() {
        let mut z = a.dot(&d.weights.mat(values));
        z += &d.bias.vec(values);
        let last = k + 1 == dense.len();
        let next = if !last && activation == DenseActivation::Relu {
            z.mapv(|x| x.max(0.0))
        } else {
            z.clone()
        };
        inputs.push(a);
        pre.push(z);
        a = next;
    }
    (DenseTrace { inputs, pre }, a.column(0).to_owned())
}

impl LstmParams {
    fn pack_windows(&self, windows: &[&[f64]]) -> Result<Array2<f64>, NeuralError> {
        let steps = self.topology.window;
        if windows.is_empty() {
            return Err(NeuralError::ShapeMismatch("empty batch".into()));
        }
        let batch = windows.len();
        let mut xs = Array2::<f64>::zeros((steps * batch, 1));
        for (b, w) in windows.iter().enumerate() {
            if w.len() != steps {
                return Err(NeuralError::ShapeMismatch(format!(
                    "window of length {} for a network expecting {steps}",
                    w.len()
                )));
            }
            for (t, &x) in w.iter().enumerate() {
                xs[[t * batch + b, 0]] = x;
            }
        }
        Ok(xs)
    }

    pub(crate) fn forward_trace<R: Rng>(
        &self,
        windows: &[&[f64]],
        mut dropout_rng: Option<&mut R>,
    ) -> Result<ForwardTrace, NeuralError> {
        let steps = self.topology.window;
        let batch = windows.len();
        let mut seq = self.pack_windows(windows)?;
        let values = &self.values;
        let mut layers = Vec::with_capacity(self.layout.cells.len());
        for layer in &self.layout.cells {
            let cells: Vec<CellTrace> = layer
                .iter()
                .enumerate()
                .map(|(d, cell)| cell_forward(values, cell, seq.clone(), steps, batch, d == 1))
                .collect();
            let views: Vec<ArrayView2<f64>> = cells.iter().map(|c| c.hs.view()).collect();
            seq = concatenate(Axis(1), &views).expect("same row count");
            let rate = self.topology.dropout;
            let mask = match dropout_rng.as_deref_mut() {
                Some(rng) if rate > 0.0 => {
                    let keep = 1.0 / (1.0 - rate);
                    let m = Array2::from_shape_fn(seq.raw_dim(), |_| {
                        if rng.random::<f64>() < rate {
                            0.0
                        } else {
                            keep
                        }
                    });
                    seq *= &m;
                    Some(m)
                }
                _ => None,
            };
            layers.push(LayerTrace { cells, mask });
        }
        let last = self.layout.cells.last().expect("at least one layer");
        let hidden = last[0].hidden;
        let mut repr = seq.slice(s![(steps - 1) * batch.., ..hidden]).to_owned();
        if self.topology.bidirectional {
            let back = seq.slice(s![..batch, hidden..]);
            repr = concatenate(Axis(1), &[repr.view(), back]).expect("same batch");
        }
        let (dense, output) = dense_forward(
            values,
            &self.layout.dense,
            self.topology.dense_activation,
            repr,
        );
        Ok(ForwardTrace {
            layers,
            dense,
            output,
        })
    }

    /// Predictions (in scaled units) for a batch of windows.
    pub fn forward_batch(&self, windows: &[&[f64]]) -> Result<Vec<f64>, NeuralError> {
        Ok(self
            .forward_trace::<rand_chacha::ChaCha8Rng>(windows, None)?
            .output
            .to_vec())
    }

    pub fn forward(&self, window: &[f64]) -> Result<f64, NeuralError> {
        Ok(self.forward_batch(&[window])?[0])
    }

    /// Mean squared error over the batch and its gradient w.r.t. every
    /// parameter (same layout as [`LstmParams::values`]).
    pub fn loss_and_gradient(
        &self,
        windows: &[&[f64]],
        targets: &[f64],
    ) -> Result<(f64, Vec<f64>), NeuralError> {
        self.loss_and_gradient_with::<rand_chacha::ChaCha8Rng>(windows, targets, None)
    }

    pub(crate) fn loss_and_gradient_with<R: Rng>(
        &self,
        windows: &[&[f64]],
        targets: &[f64],
        dropout_rng: Option<&mut R>,
    ) -> Result<(f64, Vec<f64>), NeuralError> {
        if windows.len() != targets.len() {
            return Err(NeuralError::ShapeMismatch(format!(
                "{} windows vs {} targets",
                windows.len(),
                targets.len()
            )));
        }
        let trace = self.forward_trace(windows, dropout_rng)?;
        let batch = windows.len();
        let steps = self.topology.window;
        let values = &self.values;
        let mut grad = vec![0.0; values.len()];

        let scale = 2.0 / batch as f64;
        let mut loss = 0.0;
        let mut d_out = Array2::<f64>::zeros((batch, 1));
        for b in 0..batch {
            let e = trace.output[b] - targets[b];
            loss += e * e;
            d_out[[b, 0]] = scale * e;
        }
        loss /= batch as f64;

        // Dense stack, last layer first.
        let mut da = d_out;
        let n_dense = self.layout.dense.len();
        for k in (0..n_dense).rev() {
            let d = &self.layout.dense[k];
            let mut dz = da;
            if k + 1 < n_dense && self.topology.dense_activation == DenseActivation::Relu {
                dz.zip_mut_with(&trace.dense.pre[k], |g, &z| {
                    if z <= 0.0 {
                        *g = 0.0
                    }
                });
            }
            let input = &trace.dense.inputs[k];
            {
                let mut gw = d.weights.mat_mut(&mut grad);
                general_mat_mul(1.0, &input.t(), &dz, 1.0, &mut gw);
            }
            {
                let mut gb = d.bias.vec_mut(&mut grad);
                gb += &dz.sum_axis(Axis(0));
            }
            da = dz.dot(&d.weights.mat(values).t());
        }

        // Gradient w.r.t. the last layer's output sequence: only the final
        // forward state and (bidirectional) the final backward state feed
        // the dense stack.
        let last = self.layout.cells.last().expect("layers");
        let hidden = last[0].hidden;
        let dirs = last.len();
        let mut d_seq = Array2::<f64>::zeros((steps * batch, hidden * dirs));
        d_seq
            .slice_mut(s![(steps - 1) * batch.., ..hidden])
            .assign(&da.slice(s![.., ..hidden]));
        if dirs == 2 {
            d_seq
                .slice_mut(s![..batch, hidden..])
                .assign(&da.slice(s![.., hidden..]));
        }

        for l in (0..self.layout.cells.len()).rev() {
            let layer = &self.layout.cells[l];
            let lt = &trace.layers[l];
            if let Some(mask) = &lt.mask {
                d_seq *= mask;
            }
            let h = layer[0].hidden;
            let need_input = l > 0;
            let mut d_input: Option<Array2<f64>> = None;
            for (d, cell) in layer.iter().enumerate() {
                let d_hs = d_seq.slice(s![.., d * h..(d + 1) * h]).to_owned();
                let dx = cell_backward(
                    values,
                    &mut grad,
                    cell,
                    &lt.cells[d],
                    &d_hs,
                    steps,
                    batch,
                    need_input,
                );
                if let Some(dx) = dx {
                    d_input = Some(match d_input {
                        Some(acc) => acc + dx,
                        None => dx,
                    });
                }
            }
            if let Some(dx) = d_input {
                d_seq = dx;
            }
        }
        Ok((loss, grad))
    }
}
