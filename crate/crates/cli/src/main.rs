//! `qweather` — drive the quantum-vs-classical forecasting study end to end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qweather_cli::{cache_dir_from_env, ExperimentConfig, Pipeline};
use qweather_core::Stage;

#[derive(Parser)]
#[command(
    name = "qweather",
    about = "Quantum and classical daily weather forecasting experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Never touch the network; every request must hit the cache
    #[arg(long, global = true)]
    offline: bool,

    /// Worker threads (default: logical cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Base seed; run i uses seed_base + i
    #[arg(long, global = true, default_value_t = 42)]
    seed_base: u64,

    /// Output directory (overrides the config's out_dir)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Download (or validate) the cached dataset for the study window
    Fetch,
    /// Correlation matrix, lag correlogram, descriptive stats, feature plan
    Analyze,
    /// Train every configured model over the seeded runs
    Train,
    /// Render figures and the comparison table from run artifacts
    Report,
    /// fetch + analyze + train + report
    All,
}

fn exit_code_for(stage: Stage) -> u8 {
    match stage {
        Stage::Config => 2,
        Stage::Data => 3,
        Stage::Training => 4,
        Stage::Report => 5,
    }
}

fn run(cli: &Cli) -> qweather_core::Result<()> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| qweather_core::Error::Config("--config PATH is required".into()))?;
    let config = ExperimentConfig::load(config_path)?;
    let cache_dir = cache_dir_from_env();
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(qweather_core::Error::Config(
            "--jobs must be positive".into(),
        ));
    }
    let pipeline = Pipeline::new(
        config,
        cache_dir.clone(),
        cli.offline,
        cli.seed_base,
        cli.out.clone(),
    );
    println!(
        "study {} | seed base {} | jobs {jobs} | cache {} | offline {}",
        pipeline.config.name,
        cli.seed_base,
        cache_dir.display(),
        cli.offline
    );

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| qweather_core::Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Fetch => pipeline.fetch().map(|_| ()),
        Command::Analyze => pipeline.analyze().map(|_| ()),
        Command::Train => pipeline.train().map(|_| ()),
        Command::Report => pipeline.report(),
        Command::All => pipeline.all(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let stage = e.stage();
            eprintln!("error ({stage:?} stage): {e}");
            ExitCode::from(exit_code_for(stage))
        }
    }
}
