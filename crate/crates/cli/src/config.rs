//! Experiment configuration: a flat `key = value` file (comments with `#`,
//! dotted keys for the per-model sections) plus CLI overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use qweather_core::ingest::catalog::ParameterCatalog;
use qweather_core::qnn::MeasureMode;
use qweather_core::{DateRange, Entangler, Error, GeoPoint, Result};

/// One entry of the model matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Qnn { entangler: Entangler, depth: usize },
    Rnn,
}

impl ModelChoice {
    pub fn slug(&self) -> String {
        match self {
            ModelChoice::Qnn { entangler, depth } => {
                let e = match entangler {
                    Entangler::Basic => 1,
                    Entangler::Strong => 2,
                };
                format!("exp{e}_d{depth}")
            }
            ModelChoice::Rnn => "rnn".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s == "rnn" {
            return Ok(ModelChoice::Rnn);
        }
        let parts: Vec<&str> = s.split("_d").collect();
        let bad = || Error::Config(format!("unknown model `{s}` (expected expN_dK or rnn)"));
        if parts.len() != 2 {
            return Err(bad());
        }
        let entangler = match parts[0] {
            "exp1" => Entangler::Basic,
            "exp2" => Entangler::Strong,
            _ => return Err(bad()),
        };
        let depth: usize = parts[1].parse().map_err(|_| bad())?;
        if depth == 0 {
            return Err(bad());
        }
        Ok(ModelChoice::Qnn { entangler, depth })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSection {
    pub epochs: usize,
    pub learning_rate: f64,
}

/// Fully resolved study configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    /// Catalog name of the target quantity.
    pub target: String,
    pub point: GeoPoint,
    pub window: DateRange,
    pub horizon: usize,
    pub lag_override: Option<usize>,
    pub max_lag: usize,
    pub threshold: f64,
    pub models: Vec<ModelChoice>,
    pub readout: MeasureMode,
    pub angle_scale: f64,
    pub qnn: TrainSection,
    pub rnn: TrainSection,
    pub rnn_hidden: usize,
    pub batch_size: usize,
    pub validation_split: f64,
    pub runs: usize,
    pub out_dir: PathBuf,
    pub catalog: ParameterCatalog,
}

fn parse_kv(text: &str, origin: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("{origin}:{}: expected `key = value`", idx + 1))
        })?;
        let key = k.trim().to_string();
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Config(format!(
                "{origin}:{}: duplicate key `{key}`",
                idx + 1
            )));
        }
    }
    Ok(map)
}

const KNOWN_KEYS: &[&str] = &[
    "name",
    "target",
    "latitude",
    "longitude",
    "window_start",
    "window_end",
    "horizon",
    "lag",
    "max_lag",
    "threshold",
    "models",
    "readout",
    "angle_scale",
    "qnn.epochs",
    "qnn.learning_rate",
    "rnn.epochs",
    "rnn.learning_rate",
    "rnn.hidden",
    "batch_size",
    "validation_split",
    "runs",
    "out_dir",
    "catalog",
];

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string(), path.parent())
    }

    pub fn parse(text: &str, origin: &str, base_dir: Option<&Path>) -> Result<Self> {
        let map = parse_kv(text, origin)?;
        for key in map.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("{origin}: unknown key `{key}`")));
            }
        }
        let get = |key: &str| -> Result<&String> {
            map.get(key)
                .ok_or_else(|| Error::Config(format!("{origin}: missing key `{key}`")))
        };
        let parse_f64 = |key: &str| -> Result<f64> {
            get(key)?
                .parse()
                .map_err(|e| Error::Config(format!("{origin}: {key}: {e}")))
        };
        let parse_usize = |key: &str| -> Result<usize> {
            get(key)?
                .parse()
                .map_err(|e| Error::Config(format!("{origin}: {key}: {e}")))
        };
        let parse_date = |key: &str| -> Result<NaiveDate> {
            NaiveDate::parse_from_str(get(key)?, "%Y-%m-%d")
                .map_err(|e| Error::Config(format!("{origin}: {key}: {e}")))
        };

        let catalog = match map.get("catalog") {
            Some(rel) => {
                let p = match base_dir {
                    Some(d) => d.join(rel),
                    None => PathBuf::from(rel),
                };
                ParameterCatalog::load(&p)?
            }
            None => ParameterCatalog::default(),
        };

        let models: Vec<ModelChoice> = get("models")?
            .split(',')
            .map(|s| ModelChoice::parse(s.trim()))
            .collect::<Result<_>>()?;
        if models.is_empty() {
            return Err(Error::Config(format!("{origin}: empty model matrix")));
        }

        let readout = match map.get("readout").map(String::as_str).unwrap_or("first") {
            "first" => MeasureMode::FirstQubit,
            "mean" => MeasureMode::MeanAll,
            "weighted" => MeasureMode::WeightedAll,
            other => {
                return Err(Error::Config(format!(
                    "{origin}: readout must be first|mean|weighted, got `{other}`"
                )))
            }
        };

        let window = DateRange::new(parse_date("window_start")?, parse_date("window_end")?)?;
        let horizon = parse_usize("horizon")?;
        if horizon < 1 {
            return Err(Error::Config(format!("{origin}: horizon must be >= 1")));
        }

        let config = ExperimentConfig {
            name: get("name")?.clone(),
            target: get("target")?.clone(),
            point: GeoPoint::new(parse_f64("latitude")?, parse_f64("longitude")?)?,
            window,
            horizon,
            lag_override: match map.get("lag") {
                Some(v) => Some(
                    v.parse()
                        .map_err(|e| Error::Config(format!("{origin}: lag: {e}")))?,
                ),
                None => None,
            },
            max_lag: match map.get("max_lag") {
                Some(v) => v
                    .parse()
                    .map_err(|e| Error::Config(format!("{origin}: max_lag: {e}")))?,
                None => 40,
            },
            threshold: match map.get("threshold") {
                Some(v) => v
                    .parse()
                    .map_err(|e| Error::Config(format!("{origin}: threshold: {e}")))?,
                None => qweather_core::preprocess::DEFAULT_THRESHOLD,
            },
            models,
            readout,
            angle_scale: match map.get("angle_scale") {
                Some(v) => v
                    .parse()
                    .map_err(|e| Error::Config(format!("{origin}: angle_scale: {e}")))?,
                None => 1.0,
            },
            qnn: TrainSection {
                epochs: parse_usize("qnn.epochs")?,
                learning_rate: parse_f64("qnn.learning_rate")?,
            },
            rnn: TrainSection {
                epochs: parse_usize("rnn.epochs")?,
                learning_rate: parse_f64("rnn.learning_rate")?,
            },
            rnn_hidden: match map.get("rnn.hidden") {
                Some(v) => v
                    .parse()
                    .map_err(|e| Error::Config(format!("{origin}: rnn.hidden: {e}")))?,
                None => qweather_core::rnn::DEFAULT_HIDDEN,
            },
            batch_size: parse_usize("batch_size")?,
            validation_split: parse_f64("validation_split")?,
            runs: parse_usize("runs")?,
            out_dir: PathBuf::from(get("out_dir")?),
            catalog,
        };
        config.catalog.code_for(&config.target)?;
        Ok(config)
    }

    pub fn target_code(&self) -> &str {
        self.catalog
            .code_for(&self.target)
            .expect("validated at parse time")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = "\
name = temperature
target = instantaneous_temperature
latitude = -12.15
longitude = -44.99
window_start = 2023-05-01
window_end = 2024-04-30
horizon = 14
lag = 28
models = exp1_d1, rnn
qnn.epochs = 30
qnn.learning_rate = 0.1
rnn.epochs = 500
rnn.learning_rate = 0.001
batch_size = 10
validation_split = 0.1
runs = 10
out_dir = out/test
";

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::parse(MINIMAL, "test", None).unwrap();
        assert_eq!(cfg.name, "temperature");
        assert_eq!(cfg.target_code(), "T2M");
        assert_eq!(cfg.window.num_days(), 366);
        assert_eq!(cfg.lag_override, Some(28));
        assert_eq!(cfg.models.len(), 2);
        assert_eq!(cfg.models[0].slug(), "exp1_d1");
        assert_eq!(cfg.threshold, 0.3);
        assert_eq!(cfg.angle_scale, 1.0);
        assert_eq!(cfg.readout, MeasureMode::FirstQubit);
        assert_eq!(cfg.rnn_hidden, 256);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let bad = format!("{MINIMAL}bogus_key = 1\n");
        assert!(ExperimentConfig::parse(&bad, "test", None).is_err());
        let bad = MINIMAL.replace("horizon = 14", "horizon = zero");
        assert!(ExperimentConfig::parse(&bad, "test", None).is_err());
        let bad = MINIMAL.replace("models = exp1_d1, rnn", "models = exp3_d1");
        assert!(ExperimentConfig::parse(&bad, "test", None).is_err());
        let bad = MINIMAL.replace("target = instantaneous_temperature", "target = nonsense");
        assert!(ExperimentConfig::parse(&bad, "test", None).is_err());
    }

    #[test]
    fn model_slugs_roundtrip() {
        for slug in ["exp1_d1", "exp1_d3", "exp2_d5", "rnn"] {
            assert_eq!(ModelChoice::parse(slug).unwrap().slug(), slug);
        }
    }
}
