//! Mapping from human-readable parameter names to POWER API codes.
//!
//! The mapping ships as an editable configuration table (`name = CODE` lines)
//! with a built-in default covering the quantities the experiments use.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub code: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterCatalog {
    entries: Vec<CatalogEntry>,
}

impl Default for ParameterCatalog {
    fn default() -> Self {
        let defaults = [
            ("instantaneous_temperature", "T2M"),
            ("max_temperature", "T2M_MAX"),
            ("min_temperature", "T2M_MIN"),
            ("wind_speed", "WS10M"),
            ("max_wind_speed", "WS10M_MAX"),
            ("min_wind_speed", "WS10M_MIN"),
            ("relative_humidity", "RH2M"),
            ("dew_point", "T2MDEW"),
            ("pressure", "PS"),
            ("wind_direction", "WD10M"),
            ("solar_radiation", "ALLSKY_SFC_SW_DWN"),
            ("precipitation", "PRECTOTCORR"),
        ];
        ParameterCatalog {
            entries: defaults
                .iter()
                .map(|(n, c)| CatalogEntry {
                    name: n.to_string(),
                    code: c.to_string(),
                })
                .collect(),
        }
    }
}

impl ParameterCatalog {
    /// Parse `name = CODE` lines; `#` starts a comment.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, code) = line.split_once('=').ok_or_else(|| Error::FixtureParse {
                path: origin.to_string(),
                line: idx + 1,
                message: "expected `name = CODE`".into(),
            })?;
            let entry = CatalogEntry {
                name: name.trim().to_string(),
                code: code.trim().to_string(),
            };
            if entry.name.is_empty() || entry.code.is_empty() {
                return Err(Error::FixtureParse {
                    path: origin.to_string(),
                    line: idx + 1,
                    message: "empty name or code".into(),
                });
            }
            if entries.iter().any(|e: &CatalogEntry| e.name == entry.name) {
                return Err(Error::FixtureParse {
                    path: origin.to_string(),
                    line: idx + 1,
                    message: format!("duplicate entry `{}`", entry.name),
                });
            }
            entries.push(entry);
        }
        if entries.is_empty() {
            return Err(Error::Validation(format!(
                "catalog {origin} has no entries"
            )));
        }
        Ok(ParameterCatalog { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    /// All codes, catalog order (this fixes the cache CSV column order).
    pub fn codes(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.code.clone()).collect()
    }

    pub fn code_for(&self, name: &str) -> Result<&str> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| e.code.as_str())
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }
}
