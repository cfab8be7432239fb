//! Report artifacts: per-day forecast distributions (violin), mean loss
//! curves, and the MAE comparison chart, each as a CSV plus a self-contained
//! SVG.
//!
//! Figures are always rendered from the parsed CSV text, never from live
//! state, so a figure can never disagree with its data file. Floats are
//! written in shortest round-trip form, making re-runs byte-identical.

pub mod svg;

use crate::error::{Error, Result};
use crate::train::{accuracy_from_mae, DayStats, ExperimentResult, LossHistory};
use svg::{x_scale, y_scale, LinScale, Svg};

/// Per-day distribution of per-run predictions in native units.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolinSeries {
    /// `runs[d]` holds one prediction per run for test day `d` (1-based day).
    pub runs: Vec<Vec<f64>>,
    pub actual: Vec<f64>,
    pub stats: Vec<DayStats>,
}

impl ViolinSeries {
    pub fn from_experiment(result: &ExperimentResult) -> Result<Self> {
        let reports = &result.reports;
        if reports.is_empty() {
            return Err(Error::Aggregation("no runs to plot".into()));
        }
        let horizon = reports[0].predictions_native.len();
        if horizon == 0 {
            return Err(Error::Aggregation("empty prediction horizon".into()));
        }
        let runs: Vec<Vec<f64>> = (0..horizon)
            .map(|d| reports.iter().map(|r| r.predictions_native[d]).collect())
            .collect();
        Ok(ViolinSeries {
            runs,
            actual: reports[0].actual_native.clone(),
            stats: result.summary.per_day.clone(),
        })
    }

    pub fn to_csv(&self) -> String {
        let k = self.runs[0].len();
        let mut out = String::from("day,actual");
        for i in 1..=k {
            out.push_str(&format!(",run_{i}"));
        }
        out.push_str(",min,q1,median,q3,max\n");
        for (d, vals) in self.runs.iter().enumerate() {
            let s = &self.stats[d];
            out.push_str(&format!("{},{}", d + 1, self.actual[d]));
            for v in vals {
                out.push_str(&format!(",{v}"));
            }
            out.push_str(&format!(
                ",{},{},{},{},{}\n",
                s.min, s.q1, s.median, s.q3, s.max
            ));
        }
        out
    }
}

/// One row of the model comparison (Table-style view across configurations).
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub model: String,
    pub experiment: String,
    pub depth: String,
    pub mae: f64,
    pub accuracy_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn push(&mut self, row: ComparisonRow) -> Result<()> {
        let implied = accuracy_from_mae(row.mae);
        if (row.accuracy_pct - implied).abs() > 1e-9 {
            return Err(Error::Aggregation(format!(
                "accuracy {} does not match 100*(1-MAE) = {implied} for {} {} depth {}",
                row.accuracy_pct, row.model, row.experiment, row.depth
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,experiment,depth,mae,accuracy_pct\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.model, r.experiment, r.depth, r.mae, r.accuracy_pct
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// CSV parsing (the SVG side reads these, not the in-memory structs)
// ---------------------------------------------------------------------------

fn parse_f64(cell: &str, context: &str) -> Result<f64> {
    cell.parse::<f64>()
        .map_err(|e| Error::Aggregation(format!("{context}: bad number `{cell}`: {e}")))
}

struct ParsedViolinRow {
    day: f64,
    actual: f64,
    runs: Vec<f64>,
    min: f64,
    q1: f64,
    median: f64,
    q3: f64,
    max: f64,
}

fn parse_violin_csv(text: &str) -> Result<Vec<ParsedViolinRow>> {
    let mut rows = Vec::new();
    for line in text.lines().skip(1) {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() < 8 {
            return Err(Error::Aggregation(format!(
                "violin row too short: `{line}`"
            )));
        }
        let nums: Vec<f64> = cells
            .iter()
            .map(|c| parse_f64(c, "violin csv"))
            .collect::<Result<_>>()?;
        let k = nums.len() - 7;
        rows.push(ParsedViolinRow {
            day: nums[0],
            actual: nums[1],
            runs: nums[2..2 + k].to_vec(),
            min: nums[2 + k],
            q1: nums[3 + k],
            median: nums[4 + k],
            q3: nums[5 + k],
            max: nums[6 + k],
        });
    }
    if rows.is_empty() {
        return Err(Error::Aggregation("violin csv has no data rows".into()));
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Violin figure
// ---------------------------------------------------------------------------

/// Gaussian kernel density with Silverman's bandwidth. Returns `None` for
/// degenerate samples (fewer than two distinct values).
fn kde_silverman(values: &[f64]) -> Option<(f64, impl Fn(f64) -> f64 + '_)> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    let sd = var.sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let iqr =
        crate::train::quantile_sorted(&sorted, 0.75) - crate::train::quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let h = 0.9 * spread * (n as f64).powf(-0.2);
    if !(h > 0.0) {
        return None;
    }
    Some((h, move |y: f64| {
        values
            .iter()
            .map(|&x| (-0.5 * ((y - x) / h).powi(2)).exp())
            .sum::<f64>()
    }))
}

/// Violin/box/actual overlay per test day. With fewer than two runs the
/// violin degenerates to point markers; that is expected, not an error.
pub fn emit_violin(result: &ExperimentResult, title: &str, unit: &str) -> Result<(String, String)> {
    let series = ViolinSeries::from_experiment(result)?;
    let csv = series.to_csv();
    let svg = render_violin_svg(&csv, title, unit)?;
    Ok((csv, svg))
}

fn render_violin_svg(csv: &str, title: &str, unit: &str) -> Result<String> {
    let rows = parse_violin_csv(csv)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in &rows {
        lo = lo.min(r.min).min(r.actual);
        hi = hi.max(r.max).max(r.actual);
    }
    let ys = y_scale(lo, hi);
    let xs = x_scale(0.5, rows.len() as f64 + 0.5);
    let spacing = xs.map(2.0) - xs.map(1.0);
    let half = spacing * 0.38;

    let runs = rows[0].runs.len();
    let mut svg = Svg::new(title, &format!("{runs} runs per day"));
    svg.axes(&ys, "forecast day", unit);
    for r in &rows {
        let cx = xs.map(r.day);
        if let Some((h, density)) = kde_silverman(&r.runs) {
            let y0 = r.min - h;
            let y1 = r.max + h;
            let steps = 40;
            let samples: Vec<(f64, f64)> = (0..=steps)
                .map(|i| {
                    let y = y0 + (y1 - y0) * i as f64 / steps as f64;
                    (y, density(y))
                })
                .collect();
            let dmax = samples.iter().map(|s| s.1).fold(0.0, f64::max);
            if dmax > 0.0 {
                let mut pts: Vec<(f64, f64)> = samples
                    .iter()
                    .map(|&(y, d)| (cx + half * d / dmax, ys.map(y)))
                    .collect();
                pts.extend(
                    samples
                        .iter()
                        .rev()
                        .map(|&(y, d)| (cx - half * d / dmax, ys.map(y))),
                );
                svg.polygon(&pts, "#b8cbe4", "#7a93b5");
            }
        } else {
            for v in &r.runs {
                svg.circle(cx, ys.map(*v), 2.2, "#7a93b5");
            }
        }
        // box/whisker overlay is the authoritative element at this sample size
        svg.line(cx, ys.map(r.min), cx, ys.map(r.max), "#444", 1.0, None);
        let bw = spacing * 0.12;
        svg.rect(
            cx - bw,
            ys.map(r.q3),
            2.0 * bw,
            (ys.map(r.q1) - ys.map(r.q3)).abs(),
            "#e8eef6",
            "#444",
        );
        svg.line(
            cx - bw,
            ys.map(r.median),
            cx + bw,
            ys.map(r.median),
            "#222",
            1.4,
            None,
        );
        svg.circle(cx, ys.map(r.actual), 3.2, "#d62728");
        svg.text(
            cx,
            svg::HEIGHT - svg::MARGIN_BOTTOM + 16.0,
            10.0,
            "middle",
            &format!("{}", r.day as usize),
        );
    }
    svg.text(
        svg::WIDTH - svg::MARGIN_RIGHT,
        svg::MARGIN_TOP + 4.0,
        10.0,
        "end",
        "red dot = observed",
    );
    Ok(svg.finish())
}

// ---------------------------------------------------------------------------
// Loss curves
// ---------------------------------------------------------------------------

/// Mean train/validation loss per epoch across runs.
pub fn emit_loss_curves(histories: &[&LossHistory], title: &str) -> Result<(String, String)> {
    if histories.is_empty() {
        return Err(Error::Aggregation("no loss histories".into()));
    }
    let epochs = histories[0].train.len();
    for h in histories {
        if h.train.len() != epochs || h.val.len() != epochs {
            return Err(Error::Aggregation(format!(
                "loss histories disagree on epoch count ({} vs {epochs})",
                h.train.len()
            )));
        }
    }
    if epochs == 0 {
        return Err(Error::Aggregation("empty loss histories".into()));
    }
    let k = histories.len() as f64;
    let mut csv = String::from("epoch,train_mean,val_mean\n");
    for e in 0..epochs {
        let t: f64 = histories.iter().map(|h| h.train[e]).sum::<f64>() / k;
        let v: f64 = histories.iter().map(|h| h.val[e]).sum::<f64>() / k;
        csv.push_str(&format!("{},{t},{v}\n", e + 1));
    }
    let svg = render_loss_svg(&csv, title)?;
    Ok((csv, svg))
}

fn render_loss_svg(csv: &str, title: &str) -> Result<String> {
    let mut epochs = Vec::new();
    let mut train = Vec::new();
    let mut val = Vec::new();
    for line in csv.lines().skip(1) {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 3 {
            return Err(Error::Aggregation(format!("loss row malformed: `{line}`")));
        }
        epochs.push(parse_f64(cells[0], "loss csv")?);
        train.push(parse_f64(cells[1], "loss csv")?);
        val.push(parse_f64(cells[2], "loss csv")?);
    }
    let lo = train
        .iter()
        .chain(&val)
        .fold(f64::INFINITY, |a, &b| a.min(b));
    let hi = train
        .iter()
        .chain(&val)
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let ys = y_scale(lo.min(0.0), hi);
    let xs = x_scale(epochs[0], *epochs.last().unwrap());
    let mut svg = Svg::new(title, "");
    svg.axes(&ys, "epoch", "MSE (standardized)");
    let pts = |vals: &[f64]| -> Vec<(f64, f64)> {
        epochs
            .iter()
            .zip(vals)
            .map(|(&e, &v)| (xs.map(e), ys.map(v)))
            .collect()
    };
    svg.polyline(&pts(&train), "#1f77b4", 1.6);
    svg.polyline(&pts(&val), "#d62728", 1.6);
    svg.text(
        svg::WIDTH - svg::MARGIN_RIGHT,
        svg::MARGIN_TOP + 4.0,
        10.0,
        "end",
        "blue = training, red = validation",
    );
    Ok(svg.finish())
}

// ---------------------------------------------------------------------------
// MAE comparison chart
// ---------------------------------------------------------------------------

/// Bars for the circuit configurations plus a dashed baseline rule for the
/// recurrent model. Bar heights equal the table MAEs exactly.
pub fn emit_mae_chart(table: &ComparisonTable, title: &str) -> Result<(String, String)> {
    if table.rows.is_empty() {
        return Err(Error::Aggregation("empty comparison table".into()));
    }
    let mut csv = String::from("model,experiment,depth,mae\n");
    for r in &table.rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            r.model, r.experiment, r.depth, r.mae
        ));
    }
    let svg = render_mae_svg(&csv, title)?;
    Ok((csv, svg))
}

struct MaeRow {
    model: String,
    experiment: String,
    depth: String,
    mae: f64,
}

fn render_mae_svg(csv: &str, title: &str) -> Result<String> {
    let mut rows = Vec::new();
    for line in csv.lines().skip(1) {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 4 {
            return Err(Error::Aggregation(format!("mae row malformed: `{line}`")));
        }
        rows.push(MaeRow {
            model: cells[0].to_string(),
            experiment: cells[1].to_string(),
            depth: cells[2].to_string(),
            mae: parse_f64(cells[3], "mae csv")?,
        });
    }
    let bars: Vec<&MaeRow> = rows.iter().filter(|r| r.model != "RNN").collect();
    let baseline = rows.iter().find(|r| r.model == "RNN");
    let hi = rows.iter().map(|r| r.mae).fold(0.0, f64::max);
    let ys = y_scale(0.0, hi);
    let xs = x_scale(0.0, bars.len().max(1) as f64);
    let mut svg = Svg::new(title, "");
    svg.axes(
        &ys,
        "configuration (experiment / layers)",
        "MAE (standardized)",
    );
    let slot = xs.map(1.0) - xs.map(0.0);
    for (i, bar) in bars.iter().enumerate() {
        let x = xs.map(i as f64) + slot * 0.15;
        let w = slot * 0.7;
        let y = ys.map(bar.mae);
        let y0 = ys.map(0.0);
        let fill = if bar.experiment == "1" {
            "#5a5a5a"
        } else {
            "#b4b4b4"
        };
        svg.rect(x, y, w, y0 - y, fill, "#333");
        svg.text(
            x + w / 2.0,
            y - 4.0,
            9.0,
            "middle",
            &svg::tick_label(bar.mae),
        );
        svg.text(
            x + w / 2.0,
            svg::HEIGHT - svg::MARGIN_BOTTOM + 16.0,
            10.0,
            "middle",
            &format!("E{} / {}", bar.experiment, bar.depth),
        );
    }
    if let Some(b) = baseline {
        let y = ys.map(b.mae);
        svg.line(
            svg::MARGIN_LEFT,
            y,
            svg::WIDTH - svg::MARGIN_RIGHT,
            y,
            "#2ca02c",
            1.6,
            Some("6,4"),
        );
        svg.text(
            svg::WIDTH - svg::MARGIN_RIGHT,
            y - 5.0,
            10.0,
            "end",
            &format!("RNN baseline {}", svg::tick_label(b.mae)),
        );
    }
    Ok(svg.finish())
}

pub use svg::LinScale as Scale;
const _: fn(f64, f64, f64, f64) -> LinScale = LinScale::new;
