//! Quantum-vs-classical daily weather forecasting pipeline.
//!
//! The crate covers the full study end to end: ingestion of daily
//! meteorological records (NASA POWER web service or offline fixtures),
//! correlation-driven feature and lag engineering, an exact statevector
//! simulator with parameter-shift gradients for the variational circuit
//! models, an Elman recurrent baseline, the seeded training driver, and the
//! CSV/SVG report generators.

pub mod dataset;
pub mod error;
pub mod ingest;
pub mod linalg;
pub mod manifest;
pub mod preprocess;
pub mod qnn;
pub mod qsim;
pub mod report;
pub mod rnn;
pub mod train;

pub use dataset::{Column, DailyDataset, DateRange, GeoPoint};
pub use error::{Error, Result, Stage};
pub use ingest::{extend_for_lag, load_fixture, PowerClient};
pub use preprocess::{CorrelationMatrix, FeaturePlan, ModelData, Scaler, SplitDataset};
pub use qnn::{AnsatzSpec, Entangler, QnnParams};
pub use qsim::{zero_state, GateOp, StateVector};
pub use rnn::{RnnParams, RnnSpec};
pub use train::{
    ExperimentResult, ExperimentSummary, LossHistory, ModelSpec, RunReport, TrainConfig,
};
