//! Stage orchestration: fetch -> analyze -> train -> report, with
//! content-hash guards so re-running a stage on unchanged inputs is a no-op.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use qweather_core::dataset::DailyDataset;
use qweather_core::ingest::{extend_for_lag, PowerClient};
use qweather_core::manifest::{
    qnn_params_json, rnn_params_json, ExperimentManifest, ModelRecord, RunRecord,
};
use qweather_core::preprocess::{
    build_model_data, choose_lag, correlation_matrix, correlogram_csv, describe, describe_csv,
    lag_correlogram, select_features, FeaturePlan, ModelData,
};
use qweather_core::qnn::{AnsatzSpec, QnnParams};
use qweather_core::report::{
    emit_loss_curves, emit_mae_chart, emit_violin, ComparisonRow, ComparisonTable,
};
use qweather_core::rnn::{RnnParams, RnnSpec};
use qweather_core::train::{
    run_experiment, summarize, ExperimentResult, LossHistory, ModelSpec, RunReport, TrainConfig,
};
use qweather_core::{Entangler, Error, Result};

use crate::config::{ExperimentConfig, ModelChoice};

pub struct Pipeline {
    pub config: ExperimentConfig,
    pub cache_dir: PathBuf,
    pub offline: bool,
    pub seed_base: u64,
    pub out_dir: PathBuf,
}

pub struct Analysis {
    /// Dataset over the lag-extended window.
    pub extended: DailyDataset,
    pub lag: usize,
    pub plan: FeaturePlan,
    pub data: ModelData,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn hash16(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl Pipeline {
    pub fn new(
        config: ExperimentConfig,
        cache_dir: PathBuf,
        offline: bool,
        seed_base: u64,
        out_override: Option<PathBuf>,
    ) -> Self {
        let out_dir = out_override.unwrap_or_else(|| config.out_dir.clone());
        Pipeline {
            config,
            cache_dir,
            offline,
            seed_base,
            out_dir,
        }
    }

    fn client(&self) -> PowerClient<qweather_core::ingest::HttpTransport> {
        PowerClient::new(&self.cache_dir).offline(self.offline)
    }

    /// Resolve the lag: the configured override, or the correlogram argmax
    /// computed over the nominal window.
    fn resolve_lag(&self) -> Result<usize> {
        let cfg = &self.config;
        if let Some(lag) = cfg.lag_override {
            if lag < 1 || lag > cfg.max_lag {
                return Err(Error::LagOutOfRange(lag, cfg.max_lag));
            }
            return Ok(lag);
        }
        let nominal = self
            .client()
            .fetch_daily(&cfg.point, &cfg.window, &cfg.catalog.codes())?;
        let target = nominal.values(cfg.target_code())?;
        let correlogram = lag_correlogram(target, cfg.max_lag)?;
        choose_lag(&correlogram, None)
    }

    /// Populate the cache for the study's (lag-extended) request.
    pub fn fetch(&self) -> Result<(DailyDataset, usize)> {
        let lag = self.resolve_lag()?;
        let range = extend_for_lag(self.config.window, lag);
        let ds =
            self.client()
                .fetch_daily(&self.config.point, &range, &self.config.catalog.codes())?;
        println!(
            "[fetch] {} rows covering {}..{} ({} columns)",
            ds.len(),
            range.start(),
            range.end(),
            ds.columns().len()
        );
        Ok((ds, lag))
    }

    /// Correlation matrix, correlogram, descriptive stats, feature plan.
    pub fn analyze(&self) -> Result<Analysis> {
        let cfg = &self.config;
        let (extended, lag) = self.fetch()?;
        let modeling = extended.slice(cfg.window)?;

        let names = modeling.column_names();
        let matrix = correlation_matrix(&modeling, &names)?;
        let climate = select_features(&matrix, cfg.target_code(), cfg.threshold)?;
        let plan = FeaturePlan::new(cfg.target_code().to_string(), climate, lag, cfg.threshold)?;

        let target_series = modeling.values(cfg.target_code())?;
        let correlogram = lag_correlogram(target_series, cfg.max_lag)?;
        let stats = describe(&modeling);

        let analyze_dir = self.out_dir.join("analyze");
        write_file(
            &analyze_dir.join("correlation_matrix.csv"),
            &matrix.to_csv(),
        )?;
        write_file(
            &analyze_dir.join("correlogram.csv"),
            &correlogram_csv(&correlogram),
        )?;
        write_file(&analyze_dir.join("describe.csv"), &describe_csv(&stats))?;
        write_file(
            &analyze_dir.join("feature_plan.json"),
            &serde_json::to_string_pretty(&plan)
                .map_err(|e| Error::Validation(format!("feature plan serialization: {e}")))?,
        )?;

        let data = build_model_data(&extended, cfg.window, &plan, cfg.horizon)?;
        println!(
            "[analyze] target {} | {} climate features + lagged target (lag {}) | split {}/{}",
            cfg.target_code(),
            plan.features.len() - 1,
            lag,
            data.split.n_train(),
            data.split.n_test()
        );
        Ok(Analysis {
            extended,
            lag,
            plan,
            data,
        })
    }

    fn model_spec(&self, choice: &ModelChoice, analysis: &Analysis) -> ModelSpec {
        let n_features = analysis.plan.features.len();
        match choice {
            ModelChoice::Qnn { entangler, depth } => {
                let mut spec = AnsatzSpec::new(n_features, *depth, *entangler)
                    .expect("feature count and depth are validated");
                spec.angle_scale = self.config.angle_scale;
                spec.measure = self.config.readout;
                ModelSpec::Qnn(spec)
            }
            ModelChoice::Rnn => ModelSpec::Rnn(RnnSpec {
                features: n_features,
                hidden: self.config.rnn_hidden,
                window: analysis.lag,
            }),
        }
    }

    fn train_config(&self, choice: &ModelChoice) -> TrainConfig {
        let cfg = &self.config;
        let section = match choice {
            ModelChoice::Qnn { .. } => &cfg.qnn,
            ModelChoice::Rnn => &cfg.rnn,
        };
        TrainConfig {
            epochs: section.epochs,
            learning_rate: section.learning_rate,
            batch_size: cfg.batch_size,
            validation_split: cfg.validation_split,
            runs: cfg.runs,
            seed_base: self.seed_base,
        }
    }

    /// Everything that determines the training outputs, hashed for the
    /// idempotence guard.
    fn study_fingerprint(&self, analysis: &Analysis) -> String {
        let cfg = &self.config;
        let mut desc = format!(
            "data={};plan={:?};horizon={};seed_base={};readout={:?};angle_scale={};batch={};vsplit={};runs={};rnn_hidden={}",
            analysis.extended.content_hash(),
            analysis.plan,
            cfg.horizon,
            self.seed_base,
            cfg.readout,
            cfg.angle_scale,
            cfg.batch_size,
            cfg.validation_split,
            cfg.runs,
            cfg.rnn_hidden,
        );
        for m in &cfg.models {
            let tc = self.train_config(m);
            desc.push_str(&format!(";{}:{}x{}", m.slug(), tc.epochs, tc.learning_rate));
        }
        hash16(&desc)
    }

    fn train_stamp_path(&self) -> PathBuf {
        self.out_dir.join(".train-stamp")
    }

    /// Train every configured model over `runs` seeds, writing per-run
    /// artifacts and the experiment manifest. Skipped entirely when the
    /// fingerprint matches a previous run.
    pub fn train(&self) -> Result<ExperimentManifest> {
        let analysis = self.analyze()?;
        let fingerprint = self.study_fingerprint(&analysis);
        let manifest_path = self.out_dir.join("manifest.json");
        if let (Ok(stamp), Ok(text)) = (
            read_file(&self.train_stamp_path()),
            read_file(&manifest_path),
        ) {
            if stamp == fingerprint {
                println!("[train] up to date (fingerprint {fingerprint}); skipping training");
                return ExperimentManifest::from_json(&text);
            }
        }

        let cfg = &self.config;
        let unit = analysis.extended.column(cfg.target_code())?.unit.clone();
        let mut models = Vec::new();
        for choice in &cfg.models {
            let slug = choice.slug();
            let spec = self.model_spec(choice, &analysis);
            let tc = self.train_config(choice);
            println!(
                "[train] {slug}: {} runs x {} epochs (lr {})",
                tc.runs, tc.epochs, tc.learning_rate
            );
            let result = run_experiment(&spec, &analysis.data, &tc)?;
            for (seed, message) in &result.failures {
                eprintln!("[train] {slug}: run with seed {seed} aborted: {message}");
            }
            let mut run_records = Vec::new();
            for report in &result.reports {
                run_records.push(self.write_run_artifacts(&slug, &spec, report, &analysis)?);
            }
            let summary = &result.summary;
            models.push(ModelRecord {
                slug: slug.clone(),
                family: match choice {
                    ModelChoice::Qnn { .. } => "qnn".into(),
                    ModelChoice::Rnn => "rnn".into(),
                },
                entangler: match choice {
                    ModelChoice::Qnn {
                        entangler: Entangler::Basic,
                        ..
                    } => Some("basic".into()),
                    ModelChoice::Qnn {
                        entangler: Entangler::Strong,
                        ..
                    } => Some("strong".into()),
                    ModelChoice::Rnn => None,
                },
                depth: match choice {
                    ModelChoice::Qnn { depth, .. } => Some(*depth),
                    ModelChoice::Rnn => None,
                },
                hidden: match choice {
                    ModelChoice::Rnn => Some(cfg.rnn_hidden),
                    _ => None,
                },
                window: match choice {
                    ModelChoice::Rnn => Some(analysis.lag),
                    _ => None,
                },
                failed: summary.failed,
                mean_mae_std: summary.mean_mae_std,
                mean_mae_native: summary.mean_mae_native,
                mean_accuracy_pct: summary.mean_accuracy_pct,
                runs: run_records,
            });
        }

        let manifest = ExperimentManifest {
            name: cfg.name.clone(),
            target_code: cfg.target_code().to_string(),
            unit,
            window_start: cfg.window.start().to_string(),
            window_end: cfg.window.end().to_string(),
            horizon: cfg.horizon,
            seed_base: self.seed_base,
            seeds: (0..cfg.runs as u64).map(|i| self.seed_base + i).collect(),
            dataset_hash: analysis.extended.content_hash(),
            feature_plan: analysis.plan.clone(),
            feature_scaler: analysis.data.feature_scaler.clone(),
            target_scaler: analysis.data.target_scaler.clone(),
            qnn_train: Some(self.train_config(&ModelChoice::Qnn {
                entangler: Entangler::Basic,
                depth: 1,
            })),
            rnn_train: Some(self.train_config(&ModelChoice::Rnn)),
            models,
        };
        write_file(&manifest_path, &manifest.to_json()?)?;
        write_file(&self.train_stamp_path(), &fingerprint)?;
        println!("[train] manifest written to {}", manifest_path.display());
        Ok(manifest)
    }

    fn write_run_artifacts(
        &self,
        slug: &str,
        spec: &ModelSpec,
        report: &RunReport,
        analysis: &Analysis,
    ) -> Result<RunRecord> {
        let dir = self
            .out_dir
            .join("runs")
            .join(slug)
            .join(report.seed.to_string());

        let mut history = String::from("epoch,train_loss,val_loss\n");
        for (e, (t, v)) in report
            .history
            .train
            .iter()
            .zip(&report.history.val)
            .enumerate()
        {
            history.push_str(&format!("{},{t},{v}\n", e + 1));
        }
        write_file(&dir.join("history.csv"), &history)?;

        let mut predictions =
            String::from("date,actual_std,predicted_std,actual_native,predicted_native\n");
        for (i, date) in analysis.data.split.test_dates.iter().enumerate() {
            predictions.push_str(&format!(
                "{date},{},{},{},{}\n",
                report.actual_std[i],
                report.predictions_std[i],
                report.actual_native[i],
                report.predictions_native[i]
            ));
        }
        write_file(&dir.join("predictions.csv"), &predictions)?;

        let params_json = match spec {
            ModelSpec::Qnn(s) => {
                let p = QnnParams::from_flat(s, &report.final_params)?;
                serde_json::json!({ "family": "qnn", "params": qnn_params_json(s, &p) })
            }
            ModelSpec::Rnn(s) => {
                let p = RnnParams::from_flat(s, &report.final_params)?;
                serde_json::json!({ "family": "rnn", "params": rnn_params_json(&p) })
            }
        };
        write_file(
            &dir.join("params.json"),
            &serde_json::to_string_pretty(&params_json)
                .map_err(|e| Error::Validation(format!("params serialization: {e}")))?,
        )?;

        Ok(RunRecord {
            seed: report.seed,
            mae_std: report.mae_std,
            mae_native: report.mae_native,
            accuracy_pct: report.accuracy_pct,
            readout_weight_abs: report.readout_bound.map(|(w, _)| w),
            readout_bias: report.readout_bound.map(|(_, b)| b),
            history_csv: format!("runs/{slug}/{}/history.csv", report.seed),
            predictions_csv: format!("runs/{slug}/{}/predictions.csv", report.seed),
            params_json: format!("runs/{slug}/{}/params.json", report.seed),
        })
    }

    /// Rebuild per-run results from the on-disk artifacts (the report stage
    /// never reads live training state).
    fn reload_results(
        &self,
        manifest: &ExperimentManifest,
        record: &ModelRecord,
    ) -> Result<ExperimentResult> {
        let mut reports = Vec::new();
        for run in &record.runs {
            let history_text = read_file(&self.out_dir.join(&run.history_csv))?;
            let mut history = LossHistory::default();
            for line in history_text.lines().skip(1) {
                let cells: Vec<&str> = line.split(',').collect();
                if cells.len() != 3 {
                    return Err(Error::Aggregation(format!("bad history row `{line}`")));
                }
                history.train.push(parse_num(cells[1])?);
                history.val.push(parse_num(cells[2])?);
            }
            let pred_text = read_file(&self.out_dir.join(&run.predictions_csv))?;
            let mut actual_std = Vec::new();
            let mut predictions_std = Vec::new();
            let mut actual_native = Vec::new();
            let mut predictions_native = Vec::new();
            for line in pred_text.lines().skip(1) {
                let cells: Vec<&str> = line.split(',').collect();
                if cells.len() != 5 {
                    return Err(Error::Aggregation(format!("bad predictions row `{line}`")));
                }
                actual_std.push(parse_num(cells[1])?);
                predictions_std.push(parse_num(cells[2])?);
                actual_native.push(parse_num(cells[3])?);
                predictions_native.push(parse_num(cells[4])?);
            }
            reports.push(RunReport {
                seed: run.seed,
                final_params: Vec::new(),
                predictions_std,
                predictions_native,
                actual_std,
                actual_native,
                history,
                mae_std: run.mae_std,
                mae_native: run.mae_native,
                accuracy_pct: run.accuracy_pct,
                readout_bound: run
                    .readout_weight_abs
                    .map(|w| (w, run.readout_bias.unwrap_or(0.0))),
            });
        }
        let summary = summarize(&reports, record.failed)?;
        let _ = manifest;
        Ok(ExperimentResult {
            reports,
            failures: Vec::new(),
            summary,
        })
    }

    /// Violin, loss, and MAE figures plus the comparison table, all derived
    /// from the run artifacts on disk.
    pub fn report(&self) -> Result<()> {
        let manifest_path = self.out_dir.join("manifest.json");
        let manifest_text = read_file(&manifest_path).map_err(|_| {
            Error::Aggregation(format!(
                "run artifacts missing ({} not found); run the train stage first",
                manifest_path.display()
            ))
        })?;
        let manifest = ExperimentManifest::from_json(&manifest_text)?;
        let report_dir = self.out_dir.join("report");
        let stamp_path = report_dir.join(".report-stamp");
        let fingerprint = hash16(&manifest_text);
        if let Ok(stamp) = read_file(&stamp_path) {
            if stamp == fingerprint {
                println!("[report] up to date; skipping");
                return Ok(());
            }
        }

        let subtitle_tag = format!("seed base {}", manifest.seed_base);
        let mut table = ComparisonTable::default();
        for record in &manifest.models {
            let result = self.reload_results(&manifest, record)?;
            let title = format!("{} {} forecasts", manifest.name, record.slug);
            let (violin_csv, violin_svg) = emit_violin(
                &result,
                &format!("{title} ({subtitle_tag})"),
                &manifest.unit,
            )?;
            let dir = report_dir.join(&record.slug);
            write_file(&dir.join("violin.csv"), &violin_csv)?;
            write_file(&dir.join("violin.svg"), &violin_svg)?;

            let histories: Vec<&LossHistory> = result.reports.iter().map(|r| &r.history).collect();
            if !histories.is_empty() && !histories[0].train.is_empty() {
                let (loss_csv, loss_svg) = emit_loss_curves(
                    &histories,
                    &format!(
                        "{} {} mean loss ({subtitle_tag})",
                        manifest.name, record.slug
                    ),
                )?;
                write_file(&dir.join("loss.csv"), &loss_csv)?;
                write_file(&dir.join("loss.svg"), &loss_svg)?;
            }

            table.push(ComparisonRow {
                model: record.family.to_uppercase(),
                experiment: match record.entangler.as_deref() {
                    Some("basic") => "1".into(),
                    Some("strong") => "2".into(),
                    _ => "-".into(),
                },
                depth: record
                    .depth
                    .map(|d| d.to_string())
                    .unwrap_or_else(|| "-".into()),
                mae: record.mean_mae_std,
                accuracy_pct: record.mean_accuracy_pct,
            })?;
        }

        write_file(&report_dir.join("comparison.csv"), &table.to_csv())?;
        let (mae_csv, mae_svg) = emit_mae_chart(
            &table,
            &format!("{} test MAE ({subtitle_tag})", manifest.name),
        )?;
        write_file(&report_dir.join("mae.csv"), &mae_csv)?;
        write_file(&report_dir.join("mae.svg"), &mae_svg)?;
        write_file(&stamp_path, &fingerprint)?;
        println!("[report] artifacts under {}", report_dir.display());
        Ok(())
    }

    /// The full chain.
    pub fn all(&self) -> Result<()> {
        self.train()?;
        self.report()
    }
}

fn parse_num(cell: &str) -> Result<f64> {
    cell.parse::<f64>()
        .map_err(|e| Error::Aggregation(format!("bad number `{cell}`: {e}")))
}
