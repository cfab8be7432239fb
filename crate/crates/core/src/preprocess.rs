//! Feature engineering: Pearson gating, lag analysis, standardization, and
//! the chronological train/test split.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::dataset::{Column, DailyDataset, DateRange};
use crate::error::{Error, Result};
use crate::linalg::{Mat, MatView};

/// Default gate: features with `|rho| < 0.3` against the target are dropped.
pub const DEFAULT_THRESHOLD: f64 = 0.3;

/// Sample Pearson correlation with pairwise deletion of missing rows.
///
/// Uses the n-1 (sample) convention for both variances; the factors cancel,
/// so the estimate is the usual `cov / (sx * sy)`.
pub fn pearson(x: &[Option<f64>], y: &[Option<f64>]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Validation(format!(
            "pearson inputs of different lengths ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let pairs: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => Some((*a, *b)),
            _ => None,
        })
        .collect();
    if pairs.len() < 2 {
        return Err(Error::SeriesTooShort {
            required: 2,
            actual: pairs.len(),
        });
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in &pairs {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ConstantSeries("left".into()));
    }
    if syy == 0.0 {
        return Err(Error::ConstantSeries("right".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Dense-series convenience wrapper.
pub fn pearson_dense(x: &[f64], y: &[f64]) -> Result<f64> {
    let xs: Vec<Option<f64>> = x.iter().copied().map(Some).collect();
    let ys: Vec<Option<f64>> = y.iter().copied().map(Some).collect();
    pearson(&xs, &ys)
}

/// Square matrix of pairwise Pearson coefficients.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub rho: Mat,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Result<f64> {
        let i = self.index(a)?;
        let j = self.index(b)?;
        Ok(self.rho.get(i, j))
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// `name,<col1>,<col2>,...` header then one row per variable.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (i, n) in self.names.iter().enumerate() {
            out.push_str(n);
            for j in 0..self.names.len() {
                out.push_str(&format!(",{}", self.rho.get(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

/// Pairwise correlations over the named columns, order preserved.
/// Each pair is computed once and mirrored, so the matrix equals its
/// transpose exactly as stored.
pub fn correlation_matrix(data: &DailyDataset, columns: &[String]) -> Result<CorrelationMatrix> {
    let series: Vec<&[Option<f64>]> = columns
        .iter()
        .map(|c| data.values(c))
        .collect::<Result<_>>()?;
    let k = columns.len();
    let mut rho = Mat::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let r = pearson(series[i], series[j]).map_err(|e| Error::CorrelationPair {
                a: columns[i].clone(),
                b: columns[j].clone(),
                message: e.to_string(),
            })?;
            rho.set(i, j, r);
            rho.set(j, i, r);
        }
    }
    Ok(CorrelationMatrix {
        names: columns.to_vec(),
        rho,
    })
}

/// All non-target columns whose absolute correlation with the target reaches
/// the threshold, in matrix order.
pub fn select_features(m: &CorrelationMatrix, target: &str, threshold: f64) -> Result<Vec<String>> {
    let t = m.index(target)?;
    let picked: Vec<String> = m
        .names
        .iter()
        .enumerate()
        .filter(|(i, name)| {
            *i != t && name.as_str() != target && m.rho.get(*i, t).abs() >= threshold
        })
        .map(|(_, name)| name.clone())
        .collect();
    if picked.is_empty() {
        return Err(Error::NoSignificantFeature {
            target: target.to_string(),
            threshold,
        });
    }
    Ok(picked)
}

/// Correlation of a series with its own past: `rho_k` for `k = 1..=max_lag`.
pub fn lag_correlogram(series: &[Option<f64>], max_lag: usize) -> Result<Vec<(usize, f64)>> {
    if series.len() <= max_lag + 1 {
        return Err(Error::SeriesTooShort {
            required: max_lag + 1,
            actual: series.len(),
        });
    }
    (1..=max_lag)
        .map(|k| Ok((k, pearson(&series[k..], &series[..series.len() - k])?)))
        .collect()
}

/// Lag choice: explicit override wins, otherwise the argmax of `rho_k`
/// (ties resolved toward the smaller lag).
pub fn choose_lag(correlogram: &[(usize, f64)], override_lag: Option<usize>) -> Result<usize> {
    if correlogram.is_empty() {
        return Err(Error::Validation("empty correlogram".into()));
    }
    let max_lag = correlogram.last().unwrap().0;
    if let Some(k) = override_lag {
        if k < 1 || k > max_lag {
            return Err(Error::LagOutOfRange(k, max_lag));
        }
        return Ok(k);
    }
    let mut best = correlogram[0];
    for &(k, r) in &correlogram[1..] {
        if r > best.1 {
            best = (k, r);
        }
    }
    Ok(best.0)
}

/// Check that `data` carries enough history before `window_start` to define a
/// `lag`-day shifted column on every modeling row.
pub fn ensure_lag_history(data: &DailyDataset, window_start: NaiveDate, lag: usize) -> Result<()> {
    let have = (window_start - data.range().start()).num_days();
    if have < lag as i64 {
        return Err(Error::InsufficientHistory {
            lag,
            missing_days: lag as i64 - have,
            window_start: window_start.to_string(),
        });
    }
    Ok(())
}

/// Append `<column>_lag<k>`: the source value `k` days earlier, missing where
/// the history runs out.
pub fn add_lag_feature(data: &DailyDataset, column: &str, lag_days: usize) -> Result<DailyDataset> {
    let src = data.column(column)?;
    let n = data.len();
    let mut values = vec![None; n];
    for i in lag_days..n {
        values[i] = src.values[i - lag_days];
    }
    data.with_column(Column {
        name: lag_column_name(column, lag_days),
        unit: src.unit.clone(),
        values,
    })
}

pub fn lag_column_name(column: &str, lag_days: usize) -> String {
    format!("{column}_lag{lag_days}")
}

/// Selected features, target, lag, and gate threshold for one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePlan {
    pub target: String,
    /// Ordered model inputs; the lagged-target column is always last.
    pub features: Vec<String>,
    pub lag_days: usize,
    pub threshold: f64,
}

impl FeaturePlan {
    pub fn new(
        target: String,
        climate_features: Vec<String>,
        lag_days: usize,
        threshold: f64,
    ) -> Result<Self> {
        let mut features = climate_features;
        features.push(lag_column_name(&target, lag_days));
        if features.iter().any(|f| *f == target) {
            return Err(Error::Validation("target cannot be its own feature".into()));
        }
        Ok(FeaturePlan {
            target,
            features,
            lag_days,
            threshold,
        })
    }

    pub fn lagged_target_column(&self) -> String {
        lag_column_name(&self.target, self.lag_days)
    }
}

/// Per-column standardization statistics (train-set mean and sample std).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub columns: Vec<ScalerColumn>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerColumn {
    pub name: String,
    pub mean: f64,
    pub std: f64,
}

impl Scaler {
    /// Fit on training rows only; a constant column is an error.
    pub fn fit(names: &[String], rows: MatView<'_>) -> Result<Self> {
        if rows.rows() < 2 {
            return Err(Error::SeriesTooShort {
                required: 2,
                actual: rows.rows(),
            });
        }
        let n = rows.rows() as f64;
        let mut columns = Vec::with_capacity(names.len());
        for (j, name) in names.iter().enumerate() {
            let mut sum = 0.0;
            for i in 0..rows.rows() {
                sum += rows.row(i)[j];
            }
            let mean = sum / n;
            let mut ss = 0.0;
            for i in 0..rows.rows() {
                let d = rows.row(i)[j] - mean;
                ss += d * d;
            }
            let std = (ss / (n - 1.0)).sqrt();
            if std == 0.0 {
                return Err(Error::ZeroVariance(name.clone()));
            }
            columns.push(ScalerColumn {
                name: name.clone(),
                mean,
                std,
            });
        }
        Ok(Scaler { columns })
    }

    pub fn column(&self, name: &str) -> Result<&ScalerColumn> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn apply_value(&self, col: usize, x: f64) -> f64 {
        let c = &self.columns[col];
        (x - c.mean) / c.std
    }

    pub fn invert_value(&self, col: usize, z: f64) -> f64 {
        let c = &self.columns[col];
        z * c.std + c.mean
    }

    /// Standardize a matrix whose columns match the fitted order.
    pub fn apply_mat(&self, m: &Mat) -> Mat {
        assert_eq!(m.cols(), self.columns.len());
        let mut out = Mat::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(i, j, self.apply_value(j, m.get(i, j)));
            }
        }
        out
    }

    pub fn invert_mat(&self, m: &Mat) -> Mat {
        assert_eq!(m.cols(), self.columns.len());
        let mut out = Mat::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(i, j, self.invert_value(j, m.get(i, j)));
            }
        }
        out
    }
}

/// The standardized design matrices for one experiment.
#[derive(Debug, Clone)]
pub struct SplitDataset {
    pub feature_names: Vec<String>,
    pub x_train: Mat,
    pub y_train: Vec<f64>,
    pub x_test: Mat,
    pub y_test: Vec<f64>,
    pub train_dates: Vec<NaiveDate>,
    pub test_dates: Vec<NaiveDate>,
    pub train_fraction: f64,
    pub test_fraction: f64,
}

impl SplitDataset {
    pub fn n_train(&self) -> usize {
        self.y_train.len()
    }

    pub fn n_test(&self) -> usize {
        self.y_test.len()
    }
}

/// Everything `train` needs, plus the fitted scalers for inverting
/// predictions back to native units.
#[derive(Debug, Clone)]
pub struct ModelData {
    pub plan: FeaturePlan,
    pub split: SplitDataset,
    pub feature_scaler: Scaler,
    pub target_scaler: Scaler,
}

/// Split the modeling rows chronologically: the last `horizon` rows are the
/// test set, everything before is training.
pub fn chronological_split(
    feature_names: &[String],
    x: &Mat,
    y: &[f64],
    dates: &[NaiveDate],
    horizon: usize,
) -> Result<(SplitDataset, usize)> {
    let rows = y.len();
    if horizon == 0 || horizon >= rows {
        return Err(Error::SplitTooLarge { horizon, rows });
    }
    let n_train = rows - horizon;
    let total = rows as f64;
    let split = SplitDataset {
        feature_names: feature_names.to_vec(),
        x_train: sub_rows(x, 0, n_train),
        y_train: y[..n_train].to_vec(),
        x_test: sub_rows(x, n_train, rows),
        y_test: y[n_train..].to_vec(),
        train_dates: dates[..n_train].to_vec(),
        test_dates: dates[n_train..].to_vec(),
        train_fraction: n_train as f64 / total,
        test_fraction: horizon as f64 / total,
    };
    Ok((split, n_train))
}

fn sub_rows(m: &Mat, r0: usize, r1: usize) -> Mat {
    let mut out = Mat::zeros(r1 - r0, m.cols());
    for i in r0..r1 {
        out.row_mut(i - r0).copy_from_slice(m.row(i));
    }
    out
}

/// Assemble the standardized per-experiment matrices from an (extended)
/// dataset: lag the target, restrict to the modeling window, reject missing
/// values in selected columns, split, and fit the scalers on training rows
/// only before applying them to both sides.
pub fn build_model_data(
    extended: &DailyDataset,
    window: DateRange,
    plan: &FeaturePlan,
    horizon: usize,
) -> Result<ModelData> {
    ensure_lag_history(extended, window.start(), plan.lag_days)?;
    let lagged = add_lag_feature(extended, &plan.target, plan.lag_days)?;
    let modeling = lagged.slice(window)?;

    let mut needed = plan.features.clone();
    needed.push(plan.target.clone());
    let mut raw = Mat::zeros(modeling.len(), needed.len());
    for (j, name) in needed.iter().enumerate() {
        let vals = modeling.values(name)?;
        for (i, v) in vals.iter().enumerate() {
            match v {
                Some(x) => raw.set(i, j, *x),
                None => {
                    return Err(Error::MissingInWindow {
                        column: name.clone(),
                        date: modeling.dates()[i].to_string(),
                    })
                }
            }
        }
    }

    let y_raw: Vec<f64> = (0..raw.rows())
        .map(|i| raw.get(i, needed.len() - 1))
        .collect();
    let mut x_raw = Mat::zeros(raw.rows(), plan.features.len());
    for i in 0..raw.rows() {
        x_raw
            .row_mut(i)
            .copy_from_slice(&raw.row(i)[..plan.features.len()]);
    }

    let (raw_split, n_train) =
        chronological_split(&plan.features, &x_raw, &y_raw, modeling.dates(), horizon)?;

    let feature_scaler = Scaler::fit(&plan.features, x_raw.row_range(0, n_train))?;
    let target_names = vec![plan.target.clone()];
    let mut y_mat = Mat::zeros(n_train, 1);
    for i in 0..n_train {
        y_mat.set(i, 0, y_raw[i]);
    }
    let target_scaler = Scaler::fit(&target_names, y_mat.view())?;

    let split = SplitDataset {
        x_train: feature_scaler.apply_mat(&raw_split.x_train),
        x_test: feature_scaler.apply_mat(&raw_split.x_test),
        y_train: raw_split
            .y_train
            .iter()
            .map(|&v| target_scaler.apply_value(0, v))
            .collect(),
        y_test: raw_split
            .y_test
            .iter()
            .map(|&v| target_scaler.apply_value(0, v))
            .collect(),
        ..raw_split
    };

    Ok(ModelData {
        plan: plan.clone(),
        split,
        feature_scaler,
        target_scaler,
    })
}

/// Descriptive statistics over the non-missing values of each column.
#[derive(Debug, Clone, PartialEq)]
pub struct DescribeRow {
    pub column: String,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

pub fn describe(data: &DailyDataset) -> Vec<DescribeRow> {
    data.columns()
        .iter()
        .filter_map(|c| {
            let vals: Vec<f64> = c.values.iter().flatten().copied().collect();
            if vals.len() < 2 {
                return None;
            }
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let ss = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
            let std = (ss / (n - 1.0)).sqrt();
            let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Some(DescribeRow {
                column: c.name.clone(),
                mean,
                std,
                min,
                max,
            })
        })
        .collect()
}

pub fn describe_csv(rows: &[DescribeRow]) -> String {
    let mut out = String::from("column,mean,std,min,max\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.column, r.mean, r.std, r.min, r.max
        ));
    }
    out
}

/// `lag,rho` rows for the correlogram report.
pub fn correlogram_csv(correlogram: &[(usize, f64)]) -> String {
    let mut out = String::from("lag,rho\n");
    for (k, r) in correlogram {
        out.push_str(&format!("{k},{r}\n"));
    }
    out
}
