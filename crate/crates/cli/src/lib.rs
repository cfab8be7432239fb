//! Library surface of the command-line driver, exposed so integration tests
//! can run pipeline stages in-process.

pub mod config;
pub mod pipeline;

pub use config::{ExperimentConfig, ModelChoice};
pub use pipeline::Pipeline;

/// Cache directory: `QWEATHER_CACHE_DIR` overrides the `cache` default.
pub fn cache_dir_from_env() -> std::path::PathBuf {
    std::env::var_os("QWEATHER_CACHE_DIR")
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::path::PathBuf::from("cache"))
}
