//! Classical baseline: a single-layer Elman network with a linear head,
//! trained by backpropagation through time on squared error.
//!
//! The recurrence is `h_t = tanh(W_in x_t + W_rec h_{t-1} + b_h)` with
//! `h_0 = 0`; the prediction is `W_out . h_W + b_out`. A window is the block
//! of standardized feature rows immediately preceding the target row; windows
//! at the head of the sequence are truncated rather than padded, and an empty
//! window degenerates to `b_out`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, matvec, vec_mat, Mat, MatView};

pub const DEFAULT_HIDDEN: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RnnSpec {
    pub features: usize,
    pub hidden: usize,
    /// Steps of history fed to the recurrence (defaults to the task lag).
    pub window: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RnnParams {
    pub w_in: Mat,       // hidden x features
    pub w_rec: Mat,      // hidden x hidden
    pub b_h: Vec<f64>,   // hidden
    pub w_out: Vec<f64>, // hidden
    pub b_out: f64,
}

impl RnnParams {
    /// Uniform `+-1/sqrt(fan_in)` weights, zero biases.
    pub fn init<R: Rng>(spec: &RnnSpec, rng: &mut R) -> Self {
        let (f, h) = (spec.features, spec.hidden);
        let mut uniform = |fan_in: usize, len: usize| -> Vec<f64> {
            let bound = 1.0 / (fan_in as f64).sqrt();
            (0..len).map(|_| rng.gen_range(-bound..bound)).collect()
        };
        let w_in_data = uniform(f, h * f);
        let w_rec_data = uniform(h, h * h);
        let w_out = uniform(h, h);
        let mut w_in = Mat::zeros(h, f);
        w_in.data_mut().copy_from_slice(&w_in_data);
        let mut w_rec = Mat::zeros(h, h);
        w_rec.data_mut().copy_from_slice(&w_rec_data);
        RnnParams {
            w_in,
            w_rec,
            b_h: vec![0.0; h],
            w_out,
            b_out: 0.0,
        }
    }

    pub fn param_count(spec: &RnnSpec) -> usize {
        spec.hidden * spec.features + spec.hidden * spec.hidden + 2 * spec.hidden + 1
    }

    /// Flat layout: `w_in`, `w_rec`, `b_h`, `w_out`, `b_out`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(
            self.w_in.data().len()
                + self.w_rec.data().len()
                + self.b_h.len()
                + self.w_out.len()
                + 1,
        );
        v.extend_from_slice(self.w_in.data());
        v.extend_from_slice(self.w_rec.data());
        v.extend_from_slice(&self.b_h);
        v.extend_from_slice(&self.w_out);
        v.push(self.b_out);
        v
    }

    pub fn from_flat(spec: &RnnSpec, flat: &[f64]) -> Result<Self> {
        if flat.len() != Self::param_count(spec) {
            return Err(Error::SpecMismatch(format!(
                "expected {} rnn parameters, got {}",
                Self::param_count(spec),
                flat.len()
            )));
        }
        let (f, h) = (spec.features, spec.hidden);
        let mut w_in = Mat::zeros(h, f);
        let mut w_rec = Mat::zeros(h, h);
        let mut off = 0;
        w_in.data_mut().copy_from_slice(&flat[off..off + h * f]);
        off += h * f;
        w_rec.data_mut().copy_from_slice(&flat[off..off + h * h]);
        off += h * h;
        let b_h = flat[off..off + h].to_vec();
        off += h;
        let w_out = flat[off..off + h].to_vec();
        off += h;
        Ok(RnnParams {
            w_in,
            w_rec,
            b_h,
            w_out,
            b_out: flat[off],
        })
    }

    fn check_window(&self, window: &MatView<'_>) -> Result<()> {
        if window.rows() > 0 && window.cols() != self.w_in.cols() {
            return Err(Error::SpecMismatch(format!(
                "window has {} features, model expects {}",
                window.cols(),
                self.w_in.cols()
            )));
        }
        Ok(())
    }
}

/// Run the recurrence over the window, returning the prediction and filling
/// `hidden_states` with `h_0..h_W` (one row per state) when provided.
fn forward_impl(
    params: &RnnParams,
    window: &MatView<'_>,
    mut hidden_states: Option<&mut Mat>,
) -> f64 {
    let h = params.b_h.len();
    let mut state = vec![0.0; h];
    let mut acc = vec![0.0; h];
    if let Some(hs) = hidden_states.as_deref_mut() {
        hs.row_mut(0).fill(0.0);
    }
    for t in 0..window.rows() {
        matvec(&params.w_rec, &state, &mut acc);
        let x = window.row(t);
        for i in 0..h {
            let pre = dot(params.w_in.row(i), x) + acc[i] + params.b_h[i];
            state[i] = pre.tanh();
        }
        if let Some(hs) = hidden_states.as_deref_mut() {
            hs.row_mut(t + 1).copy_from_slice(&state);
        }
    }
    dot(&params.w_out, &state) + params.b_out
}

/// Prediction for one window of feature rows.
pub fn rnn_forward(params: &RnnParams, window: MatView<'_>) -> Result<f64> {
    params.check_window(&window)?;
    Ok(forward_impl(params, &window, None))
}

/// Prediction plus exact gradients of `(prediction - target)^2` with respect
/// to every weight, flattened in [`RnnParams::to_flat`] order.
pub fn rnn_gradient(
    params: &RnnParams,
    window: MatView<'_>,
    target: f64,
) -> Result<(f64, Vec<f64>)> {
    let spec = RnnSpec {
        features: params.w_in.cols(),
        hidden: params.b_h.len(),
        window: window.rows(),
    };
    let mut grad = vec![0.0; RnnParams::param_count(&spec)];
    let pred = rnn_grad_into(params, window, target, &mut grad)?;
    Ok((pred, grad))
}

/// As [`rnn_gradient`] but accumulating into a caller-owned flat buffer.
/// Returns the prediction.
pub fn rnn_grad_into(
    params: &RnnParams,
    window: MatView<'_>,
    target: f64,
    grad: &mut [f64],
) -> Result<f64> {
    params.check_window(&window)?;
    let h = params.b_h.len();
    let f = params.w_in.cols();
    let w = window.rows();

    let mut hidden = Mat::zeros(w + 1, h);
    let pred = forward_impl(params, &window, Some(&mut hidden));
    let err = 2.0 * (pred - target);

    let (g_w_in, rest) = grad.split_at_mut(h * f);
    let (g_w_rec, rest) = rest.split_at_mut(h * h);
    let (g_b_h, rest) = rest.split_at_mut(h);
    let (g_w_out, g_b_out) = rest.split_at_mut(h);

    g_b_out[0] += err;
    axpy(err, hidden.row(w), g_w_out);
    if w == 0 {
        return Ok(pred);
    }

    // Transposed per-step buffers so the weight gradients become plain dot
    // products over the time axis.
    let mut delta_t = Mat::zeros(h, w); // delta_t[i][t-1] = dL/d pre-activation_t[i]
    let mut hprev_t = Mat::zeros(h, w); // h_{t-1} by column
    let mut x_t = Mat::zeros(f, w); // x_t by column

    let mut dh: Vec<f64> = params.w_out.iter().map(|&wi| err * wi).collect();
    let mut delta = vec![0.0; h];
    for t in (1..=w).rev() {
        let ht = hidden.row(t);
        for i in 0..h {
            delta[i] = dh[i] * (1.0 - ht[i] * ht[i]);
        }
        let hprev = hidden.row(t - 1);
        let x = window.row(t - 1);
        for i in 0..h {
            delta_t.set(i, t - 1, delta[i]);
            hprev_t.set(i, t - 1, hprev[i]);
        }
        for k in 0..f {
            x_t.set(k, t - 1, x[k]);
        }
        if t > 1 {
            vec_mat(&delta, &params.w_rec, &mut dh);
        }
    }

    for i in 0..h {
        let di = delta_t.row(i);
        for k in 0..f {
            g_w_in[i * f + k] += dot(di, x_t.row(k));
        }
        let row = &mut g_w_rec[i * h..(i + 1) * h];
        for j in 0..h {
            row[j] += dot(di, hprev_t.row(j));
        }
        g_b_h[i] += di.iter().sum::<f64>();
    }
    Ok(pred)
}
