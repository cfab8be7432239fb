//! Adam updates over flat parameter vectors.

use crate::error::{Error, Result};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// First/second moment estimates plus the step counter.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        AdamState {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One bias-corrected Adam update:
/// `m = b1*m + (1-b1)*g`, `v = b2*v + (1-b2)*g^2`,
/// `p -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)`.
pub fn adam_step(params: &mut [f64], grads: &[f64], state: &mut AdamState, lr: f64) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(Error::SpecMismatch(format!(
            "adam shapes: {} params, {} grads, {} moments",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
        return Err(Error::SpecMismatch(format!(
            "non-finite gradient at flat index {i}"
        )));
    }
    state.t += 1;
    let t = state.t as i32;
    let bc1 = 1.0 - BETA1.powi(t);
    let bc2 = 1.0 - BETA2.powi(t);
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = BETA1 * state.m[i] + (1.0 - BETA1) * g;
        state.v[i] = BETA2 * state.v[i] + (1.0 - BETA2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + EPSILON);
    }
    Ok(())
}
