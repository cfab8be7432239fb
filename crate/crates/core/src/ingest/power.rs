//! NASA POWER daily-point payload handling.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::dataset::{Column, DailyDataset, DateRange, GeoPoint};
use crate::error::{Error, Result};

/// POWER marks missing observations with this value in the JSON payload.
pub const MISSING_MARKER: f64 = -999.0;

/// Request URL for the daily point endpoint.
pub fn build_url(point: &GeoPoint, range: &DateRange, params: &[String]) -> String {
    format!(
        "https://power.larc.nasa.gov/api/temporal/daily/point?parameters={}&community=RE&latitude={}&longitude={}&start={}&end={}&format=JSON",
        params.join(","),
        point.lat_deg(),
        point.lon_deg(),
        range.start().format("%Y%m%d"),
        range.end().format("%Y%m%d"),
    )
}

/// Parse a POWER JSON payload into a dataset covering every day of `range`,
/// with the -999 marker converted to the missing sentinel.
pub fn parse_payload(body: &str, range: &DateRange, params: &[String]) -> Result<DailyDataset> {
    let root: Value = serde_json::from_str(body).map_err(|e| Error::PayloadParse {
        field: "<root>".into(),
        message: e.to_string(),
    })?;
    let parameter = root
        .pointer("/properties/parameter")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::PayloadParse {
            field: "properties.parameter".into(),
            message: "missing or not an object".into(),
        })?;
    let units = root.pointer("/parameters").and_then(Value::as_object);

    let mut columns = Vec::with_capacity(params.len());
    for code in params {
        let series = parameter
            .get(code)
            .and_then(Value::as_object)
            .ok_or_else(|| Error::MissingParameter {
                requested: code.clone(),
                available: parameter.keys().cloned().collect(),
            })?;
        let mut values = Vec::with_capacity(range.num_days());
        for day in range.iter() {
            let key = day.format("%Y%m%d").to_string();
            let raw = series.get(&key).ok_or_else(|| Error::PayloadParse {
                field: format!("properties.parameter.{code}.{key}"),
                message: "day absent from payload".into(),
            })?;
            let v = raw.as_f64().ok_or_else(|| Error::PayloadParse {
                field: format!("properties.parameter.{code}.{key}"),
                message: format!("expected number, got {raw}"),
            })?;
            values.push(if v == MISSING_MARKER { None } else { Some(v) });
        }
        let unit = units
            .and_then(|u| u.get(code))
            .and_then(|m| m.pointer("/units"))
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_string();
        columns.push(Column {
            name: code.clone(),
            unit,
            values,
        });
    }
    DailyDataset::new(range.iter().collect(), columns)
}

/// Canned payload builder, used by tests and the offline fixture generator.
pub fn synthesize_payload(
    range: &DateRange,
    series: &BTreeMap<String, (String, Vec<Option<f64>>)>,
) -> String {
    let mut parameter = serde_json::Map::new();
    let mut units = serde_json::Map::new();
    for (code, (unit, values)) in series {
        let mut by_day = serde_json::Map::new();
        for (day, v) in range.iter().zip(values) {
            let key = day.format("%Y%m%d").to_string();
            let num = v.unwrap_or(MISSING_MARKER);
            by_day.insert(key, serde_json::json!(num));
        }
        parameter.insert(code.clone(), Value::Object(by_day));
        units.insert(code.clone(), serde_json::json!({ "units": unit }));
    }
    serde_json::json!({
        "properties": { "parameter": parameter },
        "parameters": units,
    })
    .to_string()
}
