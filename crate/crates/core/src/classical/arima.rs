//! Seasonal ARIMA fitted by conditional sum of squares.
//!
//! With `w` the differenced series, residuals follow
//! `e_t = w_t - sum_k a_k w_{t-k} - sum_k m_k e_{t-k}`, where
//! `1 - sum a_k B^k = phi(B) Phi(B^s)` and `1 + sum m_k B^k = theta(B) Theta(B^s)`.

use serde::{Deserialize, Serialize};

use super::optim::nelder_mead;
use super::ClassicalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArimaSpec {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub seasonal_p: usize,
    pub seasonal_d: usize,
    pub seasonal_q: usize,
    pub period: usize,
    pub max_evals: usize,
}

impl Default for ArimaSpec {
    fn default() -> Self {
        Self {
            p: 0,
            d: 1,
            q: 1,
            seasonal_p: 2,
            seasonal_d: 1,
            seasonal_q: 0,
            period: 12,
            max_evals: 50,
        }
    }
}

impl ArimaSpec {
    pub fn nonseasonal(p: usize, d: usize, q: usize) -> Self {
        Self {
            p,
            d,
            q,
            seasonal_p: 0,
            seasonal_d: 0,
            seasonal_q: 0,
            period: 1,
            max_evals: 50,
        }
    }

    fn n_params(&self) -> usize {
        self.p + self.q + self.seasonal_p + self.seasonal_q
    }

    /// Series must be longer than this.
    pub fn min_len(&self) -> usize {
        self.period * (self.seasonal_d + self.seasonal_p) + self.d + 24
    }
}

/// Applies `(1 - B)^d (1 - B^s)^D`.
pub fn difference(series: &[f64], d: usize, seasonal_d: usize, period: usize) -> Vec<f64> {
    let mut w = series.to_vec();
    for _ in 0..d {
        w = w.windows(2).map(|p| p[1] - p[0]).collect();
    }
    for _ in 0..seasonal_d {
        w = (period..w.len()).map(|t| w[t] - w[t - period]).collect();
    }
    w
}

/// Coefficients of `poly` (constant term first) times `(1 - B^lag)`.
fn times_one_minus(poly: &[f64], lag: usize) -> Vec<f64> {
    let mut out = vec![0.0; poly.len() + lag];
    for (i, &c) in poly.iter().enumerate() {
        out[i] += c;
        out[i + lag] -= c;
    }
    out
}

fn multiply(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Lag polynomial `1 + sign * sum c_k B^(k*step)`.
fn lag_poly(coefs: &[f64], step: usize, sign: f64) -> Vec<f64> {
    let mut p = vec![0.0; coefs.len() * step + 1];
    p[0] = 1.0;
    for (k, &c) in coefs.iter().enumerate() {
        p[(k + 1) * step] = sign * c;
    }
    p
}

/// Maps unconstrained values to the coefficients of a stationary AR
/// polynomial `1 - sum phi_k B^k` through partial autocorrelations.
pub fn stationary_from_unconstrained(u: &[f64]) -> Vec<f64> {
    let mut phi: Vec<f64> = Vec::with_capacity(u.len());
    for (k, &x) in u.iter().enumerate() {
        let r = x.tanh();
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = prev[j] - r * prev[k - 1 - j];
        }
        phi.push(r);
    }
    phi
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaCoefficients {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub seasonal_ar: Vec<f64>,
    pub seasonal_ma: Vec<f64>,
}

impl ArimaCoefficients {
    pub fn zeros(spec: &ArimaSpec) -> Self {
        Self {
            ar: vec![0.0; spec.p],
            ma: vec![0.0; spec.q],
            seasonal_ar: vec![0.0; spec.seasonal_p],
            seasonal_ma: vec![0.0; spec.seasonal_q],
        }
    }

    fn from_unconstrained(spec: &ArimaSpec, u: &[f64]) -> Self {
        let (ar, rest) = u.split_at(spec.p);
        let (ma, rest) = rest.split_at(spec.q);
        let (sar, sma) = rest.split_at(spec.seasonal_p);
        let neg = |v: Vec<f64>| v.into_iter().map(|x| -x).collect();
        Self {
            ar: stationary_from_unconstrained(ar),
            ma: neg(stationary_from_unconstrained(ma)),
            seasonal_ar: stationary_from_unconstrained(sar),
            seasonal_ma: neg(stationary_from_unconstrained(sma)),
        }
    }

    /// Expanded (AR lags a_k, MA lags m_k), both indexed from lag 1.
    fn expanded(&self, period: usize) -> (Vec<f64>, Vec<f64>) {
        let ar = multiply(
            &lag_poly(&self.ar, 1, -1.0),
            &lag_poly(&self.seasonal_ar, period, -1.0),
        );
        let ma = multiply(
            &lag_poly(&self.ma, 1, 1.0),
            &lag_poly(&self.seasonal_ma, period, 1.0),
        );
        (ar[1..].iter().map(|c| -c).collect(), ma[1..].to_vec())
    }
}

/// CSS residuals; entries before the first full AR lag are zero.
fn residuals(w: &[f64], ar: &[f64], ma: &[f64]) -> Vec<f64> {
    let start = ar.len();
    let mut e = vec![0.0; w.len()];
    for t in start..w.len() {
        let mut v = w[t];
        for (k, a) in ar.iter().enumerate() {
            v -= a * w[t - k - 1];
        }
        for (k, m) in ma.iter().enumerate() {
            if t > k {
                v -= m * e[t - k - 1];
            }
        }
        e[t] = v;
    }
    e
}

fn css(w: &[f64], ar: &[f64], ma: &[f64]) -> f64 {
    residuals(w, ar, ma)[ar.len()..].iter().map(|e| e * e).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaModel {
    pub spec: ArimaSpec,
    pub coefficients: ArimaCoefficients,
    pub css: f64,
    pub sigma2: f64,
    pub evaluations: usize,
    /// False when the evaluation budget ran out before the simplex settled.
    pub converged: bool,
    /// Last observations and residuals needed for the next forecast.
    pub tail_values: Vec<f64>,
    pub tail_residuals: Vec<f64>,
}

impl ArimaModel {
    pub fn fit(series: &[f64], spec: &ArimaSpec) -> Result<Self, ClassicalError> {
        if spec.period == 0 {
            return Err(ClassicalError::InvalidConfig("period must be >= 1".into()));
        }
        if series.len() <= spec.min_len() {
            return Err(ClassicalError::SeriesTooShort {
                len: series.len(),
                min: spec.min_len() + 1,
            });
        }
        let w = difference(series, spec.d, spec.seasonal_d, spec.period);
        let objective = |u: &[f64]| {
            let c = ArimaCoefficients::from_unconstrained(spec, u);
            let (ar, ma) = c.expanded(spec.period);
            css(&w, &ar, &ma)
        };
        let found = nelder_mead(
            objective,
            &vec![0.0; spec.n_params()],
            0.5,
            spec.max_evals,
            1e-8,
        );
        let coefficients = ArimaCoefficients::from_unconstrained(spec, &found.x);
        Self::with_coefficients(
            series,
            spec,
            coefficients,
            found.evaluations,
            found.converged,
        )
    }

    /// Builds a model with fixed coefficients, computing residual state.
    pub fn with_coefficients(
        series: &[f64],
        spec: &ArimaSpec,
        coefficients: ArimaCoefficients,
        evaluations: usize,
        converged: bool,
    ) -> Result<Self, ClassicalError> {
        let w = difference(series, spec.d, spec.seasonal_d, spec.period);
        let (ar, ma) = coefficients.expanded(spec.period);
        if w.len() <= ar.len() {
            return Err(ClassicalError::SeriesTooShort {
                len: series.len(),
                min: series.len() + ar.len() + 1 - w.len(),
            });
        }
        let e = residuals(&w, &ar, &ma);
        let n_used = w.len() - ar.len();
        let css: f64 = e[ar.len()..].iter().map(|x| x * x).sum();
        let lags = spec.d + spec.seasonal_d * spec.period + ar.len();
        Ok(Self {
            spec: *spec,
            coefficients,
            css,
            sigma2: css / n_used as f64,
            evaluations,
            converged,
            tail_values: series[series.len().saturating_sub(lags)..].to_vec(),
            tail_residuals: e[e.len().saturating_sub(ma.len())..].to_vec(),
        })
    }

    /// Integration weights `c_k` with `y_t = w_t + sum c_k y_{t-k}`.
    fn integration(&self) -> Vec<f64> {
        let mut poly = vec![1.0];
        for _ in 0..self.spec.d {
            poly = times_one_minus(&poly, 1);
        }
        for _ in 0..self.spec.seasonal_d {
            poly = times_one_minus(&poly, self.spec.period);
        }
        poly[1..].iter().map(|c| -c).collect()
    }

    fn step(&self, values: &[f64], resid: &[f64]) -> f64 {
        let (ar, ma) = self.coefficients.expanded(self.spec.period);
        let w = difference(values, self.spec.d, self.spec.seasonal_d, self.spec.period);
        let mut w_hat = 0.0;
        for (k, a) in ar.iter().enumerate() {
            if k < w.len() {
                w_hat += a * w[w.len() - 1 - k];
            }
        }
        for (k, m) in ma.iter().enumerate() {
            if k < resid.len() {
                w_hat += m * resid[resid.len() - 1 - k];
            }
        }
        let mut y = w_hat;
        for (k, c) in self.integration().iter().enumerate() {
            y += c * values[values.len() - 1 - k];
        }
        y
    }

    /// One-step forecast after the fitted series.
    pub fn forecast(&self) -> f64 {
        self.step(&self.tail_values, &self.tail_residuals)
    }

    /// One-step forecast after `history`, keeping the fitted coefficients.
    pub fn forecast_from(&self, history: &[f64]) -> Result<f64, ClassicalError> {
        let refit =
            Self::with_coefficients(history, &self.spec, self.coefficients.clone(), 0, true)?;
        Ok(refit.forecast())
    }
}
