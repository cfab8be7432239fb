//! Daily meteorological tables: a date axis plus named, unit-tagged series.
//!
//! Missing observations are `None`, never a numeric marker. Construction
//! validates the invariants once; a dataset is immutable afterwards and safe
//! to share across threads.

use chrono::{Duration, NaiveDate};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Geographic point in decimal degrees (north and east positive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lat_deg: f64,
    lon_deg: f64,
}

impl GeoPoint {
    pub fn new(lat_deg: f64, lon_deg: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&lat_deg) {
            return Err(Error::Validation(format!(
                "latitude {lat_deg} outside [-90, 90]"
            )));
        }
        if !(-180.0..=180.0).contains(&lon_deg) {
            return Err(Error::Validation(format!(
                "longitude {lon_deg} outside [-180, 180]"
            )));
        }
        Ok(GeoPoint { lat_deg, lon_deg })
    }

    pub fn lat_deg(&self) -> f64 {
        self.lat_deg
    }

    pub fn lon_deg(&self) -> f64 {
        self.lon_deg
    }
}

/// Inclusive calendar date range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateRange {
    start: NaiveDate,
    end: NaiveDate,
}

impl DateRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start > end {
            return Err(Error::Validation(format!(
                "range start {start} after end {end}"
            )));
        }
        Ok(DateRange { start, end })
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    pub fn num_days(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }

    pub fn contains(&self, d: NaiveDate) -> bool {
        d >= self.start && d <= self.end
    }

    pub fn iter(&self) -> impl Iterator<Item = NaiveDate> {
        let start = self.start;
        (0..self.num_days() as i64).map(move |i| start + Duration::days(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub values: Vec<Option<f64>>,
}

/// Date-indexed table of named daily series.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyDataset {
    dates: Vec<NaiveDate>,
    columns: Vec<Column>,
}

impl DailyDataset {
    pub fn new(dates: Vec<NaiveDate>, columns: Vec<Column>) -> Result<Self> {
        if dates.is_empty() {
            return Err(Error::Validation("dataset has no rows".into()));
        }
        for pair in dates.windows(2) {
            let gap = (pair[1] - pair[0]).num_days();
            if gap == 0 {
                return Err(Error::Validation(format!("duplicated date {}", pair[0])));
            }
            if gap != 1 {
                return Err(Error::Validation(format!(
                    "dates not strictly increasing by one day: {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.clone()) {
                return Err(Error::Validation(format!("duplicate column `{}`", c.name)));
            }
            if c.values.len() != dates.len() {
                return Err(Error::Validation(format!(
                    "column `{}` has {} values for {} dates",
                    c.name,
                    c.values.len(),
                    dates.len()
                )));
            }
        }
        Ok(DailyDataset { dates, columns })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn range(&self) -> DateRange {
        DateRange {
            start: self.dates[0],
            end: *self.dates.last().unwrap(),
        }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn values(&self, name: &str) -> Result<&[Option<f64>]> {
        Ok(&self.column(name)?.values)
    }

    /// Row index of a date, if covered.
    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        let first = self.dates[0];
        let off = (date - first).num_days();
        if off < 0 || off as usize >= self.dates.len() {
            None
        } else {
            Some(off as usize)
        }
    }

    /// New dataset with an extra column appended.
    pub fn with_column(&self, column: Column) -> Result<Self> {
        let mut cols = self.columns.clone();
        cols.push(column);
        DailyDataset::new(self.dates.clone(), cols)
    }

    /// Restriction to the rows inside `range` (which must be covered).
    pub fn slice(&self, range: DateRange) -> Result<Self> {
        let i0 = self.index_of(range.start).ok_or_else(|| {
            Error::Validation(format!(
                "{} not covered by dataset {:?}",
                range.start,
                self.range()
            ))
        })?;
        let i1 = self.index_of(range.end).ok_or_else(|| {
            Error::Validation(format!(
                "{} not covered by dataset {:?}",
                range.end,
                self.range()
            ))
        })?;
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                unit: c.unit.clone(),
                values: c.values[i0..=i1].to_vec(),
            })
            .collect();
        DailyDataset::new(self.dates[i0..=i1].to_vec(), columns)
    }

    /// Content hash over the canonical CSV serialization (stable across runs).
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(crate::ingest::cache::to_cache_csv(self).as_bytes());
        hex(&hasher.finalize())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid date")
}
