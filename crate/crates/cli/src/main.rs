use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use esg_trendlab::config::{ConfigError, PipelineConfig, YearRange};
use esg_trendlab::fixture::generate_fixture;
use esg_trendlab::pipeline::{run_pipeline, run_stage, PipelineError, Stage};
use esg_trendlab::strategy::ThresholdMode;

/// ESG report topic analytics: TF-IDF topic weights, representativeness,
/// distinctiveness, strategic zones, rankings and regression.
#[derive(Debug, Parser)]
#[command(name = "esg-trendlab", version)]
struct Cli {
    /// Pipeline config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every stochastic step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write a scatter SVG per year.
    #[arg(long, global = true)]
    svg: bool,
    /// Heatmaps use per-year quantile scores.
    #[arg(long, global = true)]
    quantile_heatmaps: bool,
    /// Zone split: per-year medians or zero.
    #[arg(long, global = true, value_name = "median|zero")]
    threshold_mode: Option<ThresholdMode>,
    /// Inclusive year range, e.g. 2017..2020.
    #[arg(long, global = true, value_name = "A..B")]
    years: Option<YearRange>,
    /// Also cluster full topic vectors and report the overall silhouette.
    #[arg(long, global = true)]
    matrix_mode: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every stage and write the run manifest.
    Run,
    /// Load the manifest, normalize texts and count topics.
    Ingest,
    /// TF-IDF topic weights per year.
    Score,
    /// Within-industry representativeness per topic.
    Represent,
    /// Cross-sector distinctiveness per topic.
    Distinguish,
    /// Strategic coordinates, zones, trends and E/S/G triples.
    Model,
    /// Regression of representativeness on distinctiveness.
    Regress,
    /// Within-class and across-class rankings.
    Rank,
    /// Write the synthetic fixture corpus (defaults: --seed 42, --out fixture).
    Fixture,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, PipelineError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| PipelineError::Config(ConfigError::Invalid("--config <path> is required".into())))?;
    let mut config = PipelineConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.paths.output_dir = Some(absolute(out));
    }
    config.svg |= cli.svg;
    config.quantile_heatmaps |= cli.quantile_heatmaps;
    config.matrix_mode |= cli.matrix_mode;
    if let Some(mode) = cli.threshold_mode {
        config.threshold_mode = mode;
    }
    if let Some(years) = cli.years {
        config.years = Some(years);
    }
    Ok(config)
}

fn absolute(path: &Path) -> PathBuf {
    std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf())
}

fn stage_of(command: &Command) -> Option<Stage> {
    match command {
        Command::Ingest => Some(Stage::Ingest),
        Command::Score => Some(Stage::Score),
        Command::Represent => Some(Stage::Represent),
        Command::Distinguish => Some(Stage::Distinguish),
        Command::Model => Some(Stage::Model),
        Command::Regress => Some(Stage::Regress),
        Command::Rank => Some(Stage::Rank),
        Command::Run | Command::Fixture => None,
    }
}

fn fixture(cli: &Cli) -> ExitCode {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("fixture"));
    match generate_fixture(&dir, cli.seed.unwrap_or(42)) {
        Ok(files) => {
            println!("fixture: {} reports, config {}", files.texts.len(), files.config.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: fixture: cannot write {}: {err}", dir.display());
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<(), PipelineError> {
    let config = load_config(cli)?;
    match stage_of(&cli.command) {
        Some(stage) => {
            let outputs = run_stage(stage, &config)?;
            println!("{stage}: wrote {} files", outputs.len());
        }
        None => {
            let manifest = run_pipeline(&config)?;
            for s in &manifest.stages {
                println!("{}: wrote {} files in {:.2}s", s.stage, s.outputs.len(), s.wall_clock_seconds);
            }
            println!("config {}", manifest.config_hash);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Fixture = cli.command {
        return fixture(&cli);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
