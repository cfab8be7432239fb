use thiserror::Error;

/// Failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Data,
    Training,
    Report,
}

#[derive(Debug, Error)]
pub enum Error {
    // ---- data / ingest ----
    #[error("transport failure for request {request_key}: {message} (retriable)")]
    Transport {
        request_key: String,
        message: String,
    },

    #[error("malformed payload, field `{field}`: {message}")]
    PayloadParse { field: String, message: String },

    #[error("parameter `{requested}` missing from response; available: {}", available.join(", "))]
    MissingParameter {
        requested: String,
        available: Vec<String>,
    },

    #[error("{path}:{line}: {message}")]
    FixtureParse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("dataset validation: {0}")]
    Validation(String),

    #[error("cache miss for request {request_key} while offline")]
    OfflineCacheMiss { request_key: String },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("io: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    // ---- preprocess ----
    #[error("correlation undefined: series `{0}` is constant over the surviving rows")]
    ConstantSeries(String),

    #[error("correlation failed for pair ({a}, {b}): {message}")]
    CorrelationPair {
        a: String,
        b: String,
        message: String,
    },

    #[error("series too short: need more than {required} points, got {actual}")]
    SeriesTooShort { required: usize, actual: usize },

    #[error("no feature reaches |rho| >= {threshold} against `{target}`")]
    NoSignificantFeature { target: String, threshold: f64 },

    #[error("lag override {0} outside [1, {1}]")]
    LagOutOfRange(usize, usize),

    #[error(
        "insufficient history for lag {lag}: need {missing_days} more day(s) before {window_start}"
    )]
    InsufficientHistory {
        lag: usize,
        missing_days: i64,
        window_start: String,
    },

    #[error("column `{0}` has zero variance over the training rows; cannot standardize")]
    ZeroVariance(String),

    #[error("missing value in selected column `{column}` at {date}; refusing to impute")]
    MissingInWindow { column: String, date: String },

    #[error("split horizon {horizon} must be < usable rows {rows}")]
    SplitTooLarge { horizon: usize, rows: usize },

    // ---- qsim / qnn / rnn ----
    #[error("qubit count {0} outside supported range [1, {1}]")]
    QubitCapacity(usize, usize),

    #[error("gate wiring: {0}")]
    GateWiring(String),

    #[error("model spec mismatch: {0}")]
    SpecMismatch(String),

    // ---- training ----
    #[error("non-finite {what} at epoch {epoch}, batch {batch}")]
    NonFinite {
        what: &'static str,
        epoch: usize,
        batch: usize,
    },

    #[error("experiment failed: {completed} of {requested} runs completed; first failure: {first_failure}")]
    ExperimentFailed {
        completed: usize,
        requested: usize,
        first_failure: String,
    },

    // ---- report ----
    #[error("aggregation: {0}")]
    Aggregation(String),

    // ---- config ----
    #[error("config: {0}")]
    Config(String),
}

impl Error {
    /// Which pipeline stage this failure belongs to.
    pub fn stage(&self) -> Stage {
        use Error::*;
        match self {
            Config(_) => Stage::Config,
            Transport { .. }
            | PayloadParse { .. }
            | MissingParameter { .. }
            | FixtureParse { .. }
            | Validation(_)
            | OfflineCacheMiss { .. }
            | UnknownColumn(_)
            | Io { .. }
            | ConstantSeries(_)
            | CorrelationPair { .. }
            | SeriesTooShort { .. }
            | NoSignificantFeature { .. }
            | LagOutOfRange(..)
            | InsufficientHistory { .. }
            | ZeroVariance(_)
            | MissingInWindow { .. }
            | SplitTooLarge { .. } => Stage::Data,
            QubitCapacity(..)
            | GateWiring(_)
            | SpecMismatch(_)
            | NonFinite { .. }
            | ExperimentFailed { .. } => Stage::Training,
            Aggregation(_) => Stage::Report,
        }
    }

    /// True when retrying the same request may succeed (network hiccups).
    pub fn is_retriable(&self) -> bool {
        matches!(self, Error::Transport { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
