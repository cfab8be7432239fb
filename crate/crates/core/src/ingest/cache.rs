//! On-disk cache for fetched datasets: a CSV table plus a JSON sidecar with
//! units and request provenance.
//!
//! CSV schema: header `date,<code1>,<code2>,...`, ISO-8601 dates, empty cell
//! for missing, UTF-8 with LF line endings. Floats are written in Rust's
//! shortest round-trip form, so store -> load reproduces values exactly.
//! Writers create a temporary file in the cache directory and rename it into
//! place, so concurrent writers never expose a partial file.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::dataset::{Column, DailyDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub latitude: f64,
    pub longitude: f64,
    pub start: String,
    pub end: String,
    pub parameters: Vec<String>,
    pub source: String,
    pub fetched_at: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    pub units: BTreeMap<String, String>,
    pub request: Provenance,
}

pub fn csv_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.csv"))
}

pub fn sidecar_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.json"))
}

/// Canonical CSV rendering of a dataset.
pub fn to_cache_csv(ds: &DailyDataset) -> String {
    let mut out = String::from("date");
    for c in ds.columns() {
        out.push(',');
        out.push_str(&c.name);
    }
    out.push('\n');
    for (i, d) in ds.dates().iter().enumerate() {
        out.push_str(&d.format("%Y-%m-%d").to_string());
        for c in ds.columns() {
            out.push(',');
            if let Some(v) = c.values[i] {
                out.push_str(&format!("{v}"));
            }
        }
        out.push('\n');
    }
    out
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(io_err)?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("cache"),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(contents.as_bytes()).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    fs::rename(&tmp, path).map_err(io_err)
}

/// Persist a dataset under `dir/<key>.{csv,json}` atomically.
pub fn store(dir: &Path, key: &str, ds: &DailyDataset, request: Provenance) -> Result<PathBuf> {
    let units: BTreeMap<String, String> = ds
        .columns()
        .iter()
        .map(|c| (c.name.clone(), c.unit.clone()))
        .collect();
    let sidecar = Sidecar { units, request };
    let json = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| Error::Validation(format!("sidecar serialization: {e}")))?;
    write_atomic(&sidecar_path(dir, key), &json)?;
    let path = csv_path(dir, key);
    write_atomic(&path, &to_cache_csv(ds))?;
    Ok(path)
}

/// Load a cache CSV (and its sidecar when present) back into a dataset.
/// Equivalent to what the fetch path would have produced from the same
/// payload; round-trips are the identity.
pub fn load(path: &Path) -> Result<DailyDataset> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let units = read_sidecar_units(path);
    parse_cache_csv(&text, &units, &path.display().to_string())
}

fn read_sidecar_units(csv: &Path) -> BTreeMap<String, String> {
    let sidecar = csv.with_extension("json");
    fs::read_to_string(sidecar)
        .ok()
        .and_then(|s| serde_json::from_str::<Sidecar>(&s).ok())
        .map(|s| s.units)
        .unwrap_or_default()
}

pub fn parse_cache_csv(
    text: &str,
    units: &BTreeMap<String, String>,
    origin: &str,
) -> Result<DailyDataset> {
    let perr = |line: usize, message: String| Error::FixtureParse {
        path: origin.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| perr(1, "empty file".into()))?;
    let mut fields = header.split(',');
    if fields.next() != Some("date") {
        return Err(perr(1, "header must start with `date`".into()));
    }
    let codes: Vec<String> = fields.map(str::to_string).collect();
    if codes.is_empty() {
        return Err(perr(1, "no data columns in header".into()));
    }

    let mut dates = Vec::new();
    let mut values: Vec<Vec<Option<f64>>> = vec![Vec::new(); codes.len()];
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != codes.len() + 1 {
            return Err(perr(
                lineno,
                format!("expected {} cells, found {}", codes.len() + 1, cells.len()),
            ));
        }
        let d = NaiveDate::parse_from_str(cells[0], "%Y-%m-%d")
            .map_err(|e| perr(lineno, format!("bad date `{}`: {e}", cells[0])))?;
        dates.push(d);
        for (j, cell) in cells[1..].iter().enumerate() {
            let v = if cell.is_empty() {
                None
            } else {
                Some(
                    cell.parse::<f64>()
                        .map_err(|e| perr(lineno, format!("bad number `{cell}`: {e}")))?,
                )
            };
            values[j].push(v);
        }
    }

    let columns: Vec<Column> = codes
        .into_iter()
        .zip(values)
        .map(|(name, vals)| Column {
            unit: units.get(&name).cloned().unwrap_or_default(),
            name,
            values: vals,
        })
        .collect();
    DailyDataset::new(dates, columns)
}
