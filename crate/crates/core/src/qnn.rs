//! Variational circuit models: ansatz construction, forward evaluation, and
//! exact parameter-shift gradients.
//!
//! Two entanglement strategies are supported, each stacked to an arbitrary
//! depth `d`:
//! - [`Entangler::Basic`]: one `RY` rotation per qubit followed by a
//!   nearest-neighbour `CNOT` ring (control `i` -> target `i+1 mod n`);
//! - [`Entangler::Strong`]: a full three-angle `ROT` per qubit followed by a
//!   `CNOT` ring whose control-target distance grows with the layer index,
//!   `r_l = (l mod (n-1)) + 1`.
//!
//! Every circuit starts with angle encoding (`RY(x_i)` on qubit `i`, one
//! feature per qubit) and ends with a `ROT` on each qubit. The scalar readout
//! is a trainable affine map of the Pauli-Z expectation on the measured
//! wire(s): standardized targets routinely leave `[-1, 1]`, which a bare
//! expectation value cannot reach.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{zero_state, GateOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Entangler {
    /// One `RY` per qubit + nearest-neighbour CNOT ring.
    Basic,
    /// Full `ROT` per qubit + range-`r_l` CNOT ring.
    Strong,
}

impl Entangler {
    /// Trainable angles contributed per layer.
    fn angles_per_layer(self, n: usize) -> usize {
        match self {
            Entangler::Basic => n,
            Entangler::Strong => 3 * n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureMode {
    /// Expectation of Z on qubit 0 (default).
    FirstQubit,
    /// Mean of per-qubit Z expectations, one shared readout weight.
    MeanAll,
    /// Per-qubit Z expectations, one readout weight per wire.
    WeightedAll,
}

/// Circuit topology plus the encoding/readout knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub depth: usize,
    pub entangler: Entangler,
    /// Multiplier applied to standardized features before encoding.
    /// Features are used directly as radians; no rescaling to [0, pi].
    pub angle_scale: f64,
    /// Optional Hadamard-equivalent layer before encoding, off by default.
    pub superposition_prelayer: bool,
    pub measure: MeasureMode,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, depth: usize, entangler: Entangler) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::SpecMismatch(
                "ansatz needs at least one qubit".into(),
            ));
        }
        if depth == 0 {
            return Err(Error::SpecMismatch("ansatz depth must be >= 1".into()));
        }
        Ok(AnsatzSpec {
            n_qubits,
            depth,
            entangler,
            angle_scale: 1.0,
            superposition_prelayer: false,
            measure: MeasureMode::FirstQubit,
        })
    }

    pub fn layer_angle_count(&self) -> usize {
        self.depth * self.entangler.angles_per_layer(self.n_qubits)
    }

    pub fn final_rot_count(&self) -> usize {
        3 * self.n_qubits
    }

    /// Readout weights: one shared scale, or one per measured wire.
    pub fn readout_len(&self) -> usize {
        match self.measure {
            MeasureMode::FirstQubit | MeasureMode::MeanAll => 1,
            MeasureMode::WeightedAll => self.n_qubits,
        }
    }

    /// Total trainable scalars including the affine readout.
    /// With the default single-wire readout: Basic d*n + 3n + 2,
    /// Strong 3*d*n + 3n + 2.
    pub fn param_count(&self) -> usize {
        self.layer_angle_count() + self.final_rot_count() + self.readout_len() + 1
    }

    /// Gates emitted by [`build_circuit`], independent of angle values.
    pub fn gate_count(&self) -> usize {
        let n = self.n_qubits;
        let ring = if n >= 2 { n } else { 0 };
        let pre = if self.superposition_prelayer {
            2 * n
        } else {
            0
        };
        pre + n + self.depth * (n + ring) + n
    }
}

/// Trainable parameters matching one [`AnsatzSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QnnParams {
    /// Layer rotation angles, layer-major (Basic: `[l][q]`, Strong: `[l][q][abc]`).
    pub layer_angles: Vec<f64>,
    /// Final rotation angles, `[q][abc]`.
    pub final_rot: Vec<f64>,
    /// Readout scale(s): one shared weight, or one per wire in
    /// [`MeasureMode::WeightedAll`].
    pub readout: Vec<f64>,
    /// Readout offset.
    pub bias: f64,
}

impl QnnParams {
    fn fresh_readout(spec: &AnsatzSpec) -> Vec<f64> {
        vec![1.0 / spec.readout_len() as f64; spec.readout_len()]
    }

    /// Fresh parameters: angles i.i.d. uniform over `[0, 2*pi)`, readout
    /// weights summing to 1, zero offset.
    pub fn init<R: Rng>(spec: &AnsatzSpec, rng: &mut R) -> Self {
        let tau = std::f64::consts::TAU;
        QnnParams {
            layer_angles: (0..spec.layer_angle_count())
                .map(|_| rng.gen_range(0.0..tau))
                .collect(),
            final_rot: (0..spec.final_rot_count())
                .map(|_| rng.gen_range(0.0..tau))
                .collect(),
            readout: Self::fresh_readout(spec),
            bias: 0.0,
        }
    }

    pub fn zeros(spec: &AnsatzSpec) -> Self {
        QnnParams {
            layer_angles: vec![0.0; spec.layer_angle_count()],
            final_rot: vec![0.0; spec.final_rot_count()],
            readout: Self::fresh_readout(spec),
            bias: 0.0,
        }
    }

    fn validate(&self, spec: &AnsatzSpec) -> Result<()> {
        if self.layer_angles.len() != spec.layer_angle_count() {
            return Err(Error::SpecMismatch(format!(
                "expected {} layer angles, got {}",
                spec.layer_angle_count(),
                self.layer_angles.len()
            )));
        }
        if self.final_rot.len() != spec.final_rot_count() {
            return Err(Error::SpecMismatch(format!(
                "expected {} final rotation angles, got {}",
                spec.final_rot_count(),
                self.final_rot.len()
            )));
        }
        if self.readout.len() != spec.readout_len() {
            return Err(Error::SpecMismatch(format!(
                "expected {} readout weight(s), got {}",
                spec.readout_len(),
                self.readout.len()
            )));
        }
        if !self
            .layer_angles
            .iter()
            .chain(&self.final_rot)
            .chain(&self.readout)
            .all(|a| a.is_finite())
            || !self.bias.is_finite()
        {
            return Err(Error::SpecMismatch("non-finite parameter".into()));
        }
        Ok(())
    }

    /// Flat layout: layer angles, final rotations, readout weight(s), bias.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(
            self.layer_angles.len() + self.final_rot.len() + self.readout.len() + 1,
        );
        v.extend_from_slice(&self.layer_angles);
        v.extend_from_slice(&self.final_rot);
        v.extend_from_slice(&self.readout);
        v.push(self.bias);
        v
    }

    pub fn from_flat(spec: &AnsatzSpec, flat: &[f64]) -> Result<Self> {
        if flat.len() != spec.param_count() {
            return Err(Error::SpecMismatch(format!(
                "expected {} flat parameters, got {}",
                spec.param_count(),
                flat.len()
            )));
        }
        let la = spec.layer_angle_count();
        let fr = spec.final_rot_count();
        let ro = spec.readout_len();
        Ok(QnnParams {
            layer_angles: flat[..la].to_vec(),
            final_rot: flat[la..la + fr].to_vec(),
            readout: flat[la + fr..la + fr + ro].to_vec(),
            bias: flat[la + fr + ro],
        })
    }
}

fn push_layer_gates(
    gates: &mut Vec<GateOp>,
    spec: &AnsatzSpec,
    layer: usize,
    layer_angles: &[f64],
) {
    let n = spec.n_qubits;
    match spec.entangler {
        Entangler::Basic => {
            let base = layer * n;
            for q in 0..n {
                gates.push(GateOp::Ry {
                    qubit: q,
                    angle: layer_angles[base + q],
                });
            }
            if n >= 2 {
                for q in 0..n {
                    gates.push(GateOp::Cnot {
                        control: q,
                        target: (q + 1) % n,
                    });
                }
            }
        }
        Entangler::Strong => {
            let base = layer * n * 3;
            for q in 0..n {
                let i = base + q * 3;
                gates.push(GateOp::Rot {
                    qubit: q,
                    alpha: layer_angles[i],
                    beta: layer_angles[i + 1],
                    gamma: layer_angles[i + 2],
                });
            }
            if n >= 2 {
                let range = (layer % (n - 1)) + 1;
                for q in 0..n {
                    gates.push(GateOp::Cnot {
                        control: q,
                        target: (q + range) % n,
                    });
                }
            }
        }
    }
}

/// Full gate list: encoding, `depth` variational layers, final rotations.
pub fn build_circuit(
    spec: &AnsatzSpec,
    params: &QnnParams,
    features: &[f64],
) -> Result<Vec<GateOp>> {
    params.validate(spec)?;
    if features.len() != spec.n_qubits {
        return Err(Error::SpecMismatch(format!(
            "{} features for {} qubits",
            features.len(),
            spec.n_qubits
        )));
    }
    let n = spec.n_qubits;
    let mut gates = Vec::with_capacity(spec.gate_count());
    if spec.superposition_prelayer {
        // RZ(pi) then RY(pi/2) equals a Hadamard up to global phase
        for q in 0..n {
            gates.push(GateOp::Rz {
                qubit: q,
                angle: std::f64::consts::PI,
            });
            gates.push(GateOp::Ry {
                qubit: q,
                angle: std::f64::consts::FRAC_PI_2,
            });
        }
    }
    for (q, &x) in features.iter().enumerate() {
        gates.push(GateOp::Ry {
            qubit: q,
            angle: spec.angle_scale * x,
        });
    }
    for l in 0..spec.depth {
        push_layer_gates(&mut gates, spec, l, &params.layer_angles);
    }
    for q in 0..n {
        let i = q * 3;
        gates.push(GateOp::Rot {
            qubit: q,
            alpha: params.final_rot[i],
            beta: params.final_rot[i + 1],
            gamma: params.final_rot[i + 2],
        });
    }
    Ok(gates)
}

/// Run the circuit and read the per-weight measurement signals (the vector
/// the readout weights multiply).
fn measure(spec: &AnsatzSpec, params: &QnnParams, features: &[f64]) -> Result<Vec<f64>> {
    let gates = build_circuit(spec, params, features)?;
    let mut state = zero_state(spec.n_qubits)?;
    state.apply_all(&gates)?;
    match spec.measure {
        MeasureMode::FirstQubit => Ok(vec![state.expval_z(0)?]),
        MeasureMode::MeanAll => {
            let mut acc = 0.0;
            for q in 0..spec.n_qubits {
                acc += state.expval_z(q)?;
            }
            Ok(vec![acc / spec.n_qubits as f64])
        }
        MeasureMode::WeightedAll => (0..spec.n_qubits).map(|q| state.expval_z(q)).collect(),
    }
}

fn weighted(readout: &[f64], signals: &[f64], bias: f64) -> f64 {
    readout.iter().zip(signals).map(|(w, z)| w * z).sum::<f64>() + bias
}

/// Prediction on the standardized scale: `readout . <Z> + bias`.
pub fn forward(spec: &AnsatzSpec, params: &QnnParams, features: &[f64]) -> Result<f64> {
    Ok(weighted(
        &params.readout,
        &measure(spec, params, features)?,
        params.bias,
    ))
}

/// Prediction and the exact partial of the prediction w.r.t. every trainable
/// scalar, in [`QnnParams::to_flat`] order.
///
/// Circuit angles use the parameter-shift rule
/// `d<Z>/dt = (f(t + pi/2) - f(t - pi/2)) / 2`, scaled by the readout weight;
/// the readout partials are `<Z>` (weight) and `1` (bias). Encoding angles
/// are data, not parameters.
pub fn gradient(
    spec: &AnsatzSpec,
    params: &QnnParams,
    features: &[f64],
) -> Result<(f64, Vec<f64>)> {
    const SHIFT: f64 = std::f64::consts::FRAC_PI_2;
    let m0 = measure(spec, params, features)?;
    let mut partials = Vec::with_capacity(spec.param_count());
    let mut scratch = params.clone();
    let shift_pair = |scratch: &mut QnnParams,
                      pick: fn(&mut QnnParams) -> &mut Vec<f64>,
                      j: usize|
     -> Result<f64> {
        let orig = pick(scratch)[j];
        pick(scratch)[j] = orig + SHIFT;
        let plus = weighted(&params.readout, &measure(spec, scratch, features)?, 0.0);
        pick(scratch)[j] = orig - SHIFT;
        let minus = weighted(&params.readout, &measure(spec, scratch, features)?, 0.0);
        pick(scratch)[j] = orig;
        Ok((plus - minus) / 2.0)
    };
    for j in 0..params.layer_angles.len() {
        partials.push(shift_pair(&mut scratch, |p| &mut p.layer_angles, j)?);
    }
    for j in 0..params.final_rot.len() {
        partials.push(shift_pair(&mut scratch, |p| &mut p.final_rot, j)?);
    }
    partials.extend_from_slice(&m0); // d pred / d readout weight(s)
    partials.push(1.0); // d pred / d bias
    Ok((weighted(&params.readout, &m0, params.bias), partials))
}
