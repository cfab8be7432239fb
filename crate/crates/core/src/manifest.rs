//! Experiment manifest: the JSON record that, together with the cache,
//! makes a run fully reproducible. Also hosts the parameter checkpoint
//! encodings (nested numeric arrays, no binary blobs).

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::preprocess::{FeaturePlan, Scaler};
use crate::qnn::{AnsatzSpec, Entangler, QnnParams};
use crate::rnn::{RnnParams, RnnSpec};
use crate::train::TrainConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub name: String,
    pub target_code: String,
    pub unit: String,
    pub window_start: String,
    pub window_end: String,
    pub horizon: usize,
    pub seed_base: u64,
    pub seeds: Vec<u64>,
    /// Content hash of the ingested (extended) dataset.
    pub dataset_hash: String,
    pub feature_plan: FeaturePlan,
    pub feature_scaler: Scaler,
    pub target_scaler: Scaler,
    pub qnn_train: Option<TrainConfig>,
    pub rnn_train: Option<TrainConfig>,
    pub models: Vec<ModelRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelRecord {
    pub slug: String,
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entangler: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hidden: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    pub failed: bool,
    pub mean_mae_std: f64,
    pub mean_mae_native: f64,
    pub mean_accuracy_pct: f64,
    pub runs: Vec<RunRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub mae_std: f64,
    pub mae_native: f64,
    pub accuracy_pct: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub readout_weight_abs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub readout_bias: Option<f64>,
    pub history_csv: String,
    pub predictions_csv: String,
    pub params_json: String,
}

impl ExperimentManifest {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Validation(format!("manifest serialization: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("manifest parse: {e}")))
    }
}

/// Circuit parameters as nested angle arrays plus the readout pair.
pub fn qnn_params_json(spec: &AnsatzSpec, p: &QnnParams) -> Value {
    let n = spec.n_qubits;
    let layers: Vec<Value> = (0..spec.depth)
        .map(|l| match spec.entangler {
            Entangler::Basic => {
                json!(p.layer_angles[l * n..(l + 1) * n].to_vec())
            }
            Entangler::Strong => {
                let per_qubit: Vec<Vec<f64>> = (0..n)
                    .map(|q| p.layer_angles[(l * n + q) * 3..(l * n + q) * 3 + 3].to_vec())
                    .collect();
                json!(per_qubit)
            }
        })
        .collect();
    let final_rot: Vec<Vec<f64>> = (0..n)
        .map(|q| p.final_rot[q * 3..q * 3 + 3].to_vec())
        .collect();
    json!({
        "layer_angles": layers,
        "final_rot": final_rot,
        "readout": p.readout,
        "bias": p.bias,
    })
}

pub fn qnn_params_from_json(spec: &AnsatzSpec, v: &Value) -> Result<QnnParams> {
    let bad = |what: &str| Error::Validation(format!("params checkpoint: bad {what}"));
    let mut layer_angles = Vec::with_capacity(spec.layer_angle_count());
    let layers = v
        .pointer("/layer_angles")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("layer_angles"))?;
    for layer in layers {
        match spec.entangler {
            Entangler::Basic => {
                for a in layer.as_array().ok_or_else(|| bad("layer"))? {
                    layer_angles.push(a.as_f64().ok_or_else(|| bad("angle"))?);
                }
            }
            Entangler::Strong => {
                for triple in layer.as_array().ok_or_else(|| bad("layer"))? {
                    for a in triple.as_array().ok_or_else(|| bad("rotation triple"))? {
                        layer_angles.push(a.as_f64().ok_or_else(|| bad("angle"))?);
                    }
                }
            }
        }
    }
    let mut final_rot = Vec::with_capacity(spec.final_rot_count());
    for triple in v
        .pointer("/final_rot")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("final_rot"))?
    {
        for a in triple.as_array().ok_or_else(|| bad("rotation triple"))? {
            final_rot.push(a.as_f64().ok_or_else(|| bad("angle"))?);
        }
    }
    let readout: Vec<f64> = v
        .pointer("/readout")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("readout"))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| bad("readout")))
        .collect::<Result<_>>()?;
    let params = QnnParams {
        layer_angles,
        final_rot,
        readout,
        bias: v
            .pointer("/bias")
            .and_then(Value::as_f64)
            .ok_or_else(|| bad("bias"))?,
    };
    if params.layer_angles.len() != spec.layer_angle_count()
        || params.final_rot.len() != spec.final_rot_count()
        || params.readout.len() != spec.readout_len()
    {
        return Err(bad("angle counts"));
    }
    Ok(params)
}

fn mat_rows(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// Recurrent parameters as structured arrays.
pub fn rnn_params_json(p: &RnnParams) -> Value {
    json!({
        "w_in": mat_rows(&p.w_in),
        "w_rec": mat_rows(&p.w_rec),
        "b_h": p.b_h,
        "w_out": p.w_out,
        "b_out": p.b_out,
    })
}

pub fn rnn_params_from_json(spec: &RnnSpec, v: &Value) -> Result<RnnParams> {
    let bad = |what: &str| Error::Validation(format!("params checkpoint: bad {what}"));
    let read_mat = |key: &str| -> Result<Vec<f64>> {
        let rows = v
            .pointer(&format!("/{key}"))
            .and_then(Value::as_array)
            .ok_or_else(|| bad(key))?;
        let mut out = Vec::new();
        for row in rows {
            for x in row.as_array().ok_or_else(|| bad(key))? {
                out.push(x.as_f64().ok_or_else(|| bad(key))?);
            }
        }
        Ok(out)
    };
    let read_vec = |key: &str| -> Result<Vec<f64>> {
        v.pointer(&format!("/{key}"))
            .and_then(Value::as_array)
            .ok_or_else(|| bad(key))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| bad(key)))
            .collect()
    };
    let mut flat = read_mat("w_in")?;
    flat.extend(read_mat("w_rec")?);
    flat.extend(read_vec("b_h")?);
    flat.extend(read_vec("w_out")?);
    flat.push(
        v.pointer("/b_out")
            .and_then(Value::as_f64)
            .ok_or_else(|| bad("b_out"))?,
    );
    RnnParams::from_flat(spec, &flat)
}
