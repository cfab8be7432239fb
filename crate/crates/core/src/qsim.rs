//! Exact statevector simulation for small circuits.
//!
//! Supports the four gates the forecasting ansätze need (`RY`, `RZ`, the
//! composite `ROT`, and `CNOT`) plus Pauli-Z expectation values. Everything is
//! double-precision and deterministic; there is no measurement sampling.
//!
//! Conventions, fixed once and asserted by tests:
//! - qubit 0 is the **most significant** bit of the basis-state index;
//! - `RY(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]`;
//! - `RZ(t) = diag(e^{-it/2}, e^{+it/2})`;
//! - `ROT(a, b, c) = RZ(c) * RY(b) * RZ(a)` (apply `a` first).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on simulated qubits (2^24 amplitudes = 256 MiB).
pub const MAX_QUBITS: usize = 24;

/// One circuit operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp {
    Ry {
        qubit: usize,
        angle: f64,
    },
    Rz {
        qubit: usize,
        angle: f64,
    },
    /// Composite single-qubit rotation `RZ(gamma) * RY(beta) * RZ(alpha)`.
    Rot {
        qubit: usize,
        alpha: f64,
        beta: f64,
        gamma: f64,
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

/// Pure state of `n_qubits` qubits as 2^n complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// `|0...0>` on `n` qubits.
pub fn zero_state(n: usize) -> Result<StateVector> {
    if n < 1 || n > MAX_QUBITS {
        return Err(Error::QubitCapacity(n, MAX_QUBITS));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[0] = Complex64::new(1.0, 0.0);
    Ok(StateVector { n_qubits: n, amps })
}

impl StateVector {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::GateWiring(format!(
                "qubit {q} out of range for {} qubit(s)",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Bit mask of qubit `q` in the basis index (qubit 0 = most significant).
    fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    /// Apply a general single-qubit matrix `[[m00, m01], [m10, m11]]`.
    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = self.mask(q);
        let len = self.amps.len();
        let mut high = 0;
        while high < len {
            for low in 0..bit {
                let i0 = high + low;
                let i1 = i0 | bit;
                let a0 = self.amps[i0];
                let a1 = self.amps[i1];
                self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
            }
            high += bit << 1;
        }
    }

    /// Apply one gate in place.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        match *gate {
            GateOp::Ry { qubit, angle } => {
                self.check_qubit(qubit)?;
                let (s, c) = (angle / 2.0).sin_cos();
                let c = Complex64::new(c, 0.0);
                let s = Complex64::new(s, 0.0);
                self.apply_1q(qubit, [[c, -s], [s, c]]);
            }
            GateOp::Rz { qubit, angle } => {
                self.check_qubit(qubit)?;
                let e0 = Complex64::from_polar(1.0, -angle / 2.0);
                let e1 = Complex64::from_polar(1.0, angle / 2.0);
                let zero = Complex64::new(0.0, 0.0);
                self.apply_1q(qubit, [[e0, zero], [zero, e1]]);
            }
            GateOp::Rot {
                qubit,
                alpha,
                beta,
                gamma,
            } => {
                self.check_qubit(qubit)?;
                self.apply_1q(qubit, rot_matrix(alpha, beta, gamma));
            }
            GateOp::Cnot { control, target } => {
                self.check_qubit(control)?;
                self.check_qubit(target)?;
                if control == target {
                    return Err(Error::GateWiring(format!(
                        "CNOT control and target both {control}"
                    )));
                }
                let cbit = self.mask(control);
                let tbit = self.mask(target);
                for i in 0..self.amps.len() {
                    if i & cbit != 0 && i & tbit == 0 {
                        self.amps.swap(i, i | tbit);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_all(&mut self, gates: &[GateOp]) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Exact `<Z>` on one qubit: sum of +/- |a_i|^2 by the qubit's bit value.
    pub fn expval_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let bit = self.mask(qubit);
        let mut acc = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if i & bit == 0 {
                acc += p;
            } else {
                acc -= p;
            }
        }
        // rounding in the probability sum can overshoot the exact bound by an ulp
        Ok(acc.clamp(-1.0, 1.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Amplitude dump for external cross-checks: `index,re,im` rows.
    pub fn dump_csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (i, a) in self.amps.iter().enumerate() {
            out.push_str(&format!("{i},{},{}\n", a.re, a.im));
        }
        out
    }
}

/// Dense 2x2 of `ROT(alpha, beta, gamma) = RZ(gamma) * RY(beta) * RZ(alpha)`.
pub fn rot_matrix(alpha: f64, beta: f64, gamma: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (beta / 2.0).sin_cos();
    let em = |p: f64| Complex64::from_polar(1.0, p);
    // Row-by-column product of the three factors.
    [
        [
            em(-(alpha + gamma) / 2.0) * c,
            -em((alpha - gamma) / 2.0) * s,
        ],
        [
            em(-(alpha - gamma) / 2.0) * s,
            em((alpha + gamma) / 2.0) * c,
        ],
    ]
}
