//! `latsample`: sample-size planning and decision-error experiments for
//! in-band latency telemetry.

mod commands;
mod manifest;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use latsample_core::TieBreakMode;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_INFEASIBLE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "latsample", version, about)]
pub struct Cli {
    /// Directory for CSV, SVG and manifest outputs.
    #[arg(
        long,
        global = true,
        env = "LATSAMPLE_OUT_DIR",
        default_value = "latsample-out"
    )]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cochran margin of error per sample size, or sample size for a margin.
    Cochran(CochranArgs),
    /// How often each candidate path is chosen as best from n0 samples.
    Select(SelectArgs),
    /// Per-pair compliance decisions versus analytic truth, ACO x MACO.
    Heatmap(HeatmapArgs),
    /// Fits an equal-stage path model to a mean delay and a tail fraction.
    Calibrate(CalibrateArgs),
    /// Draws one sample set for a routed pair and writes it as CSV.
    Sample(SampleArgs),
    /// Writes the synthetic 35 x 17 metro topology.
    SynthTopology(SynthArgs),
}

#[derive(Debug, Args)]
pub struct CochranArgs {
    /// Confidence multiplier.
    #[arg(long, default_value_t = 1.96)]
    pub z: f64,
    /// Assumed proportion.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Sample sizes for the error table.
    #[arg(long, value_delimiter = ',', conflicts_with = "e")]
    pub n: Option<Vec<u64>>,
    /// Target margin of error; prints the required n0.
    #[arg(long)]
    pub e: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct RuleArgs {
    /// Delay threshold in microseconds.
    #[arg(long, default_value_t = 82.0)]
    pub threshold: f64,
    /// Fraction of packets that must be at or below the threshold.
    #[arg(long, default_value_t = 0.99)]
    pub required_fraction: f64,
}

#[derive(Debug, Args, Clone)]
pub struct RunArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub topology: PathBuf,
    #[arg(long)]
    pub source: String,
    /// Candidate destinations, one path each.
    #[arg(long, value_delimiter = ',', required = true)]
    pub destinations: Vec<String>,
    #[command(flatten)]
    pub rule: RuleArgs,
    #[arg(long, value_delimiter = ',', default_value = "5,10,50,100,400")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = TieBreakMode::Uniform)]
    pub tie_break: TieBreakMode,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    #[arg(long)]
    pub topology: PathBuf,
    #[command(flatten)]
    pub rule: RuleArgs,
    #[arg(long, value_delimiter = ',', default_value = "5,100,2500")]
    pub sizes: Vec<usize>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Propagation offset in microseconds.
    #[arg(long)]
    pub offset: f64,
    /// Total queuing mean in microseconds.
    #[arg(long)]
    pub mean: f64,
    #[arg(long, default_value_t = 82.0)]
    pub threshold: f64,
    /// Target fraction of packets below the threshold.
    #[arg(long)]
    pub target: f64,
    #[arg(long, default_value_t = 8)]
    pub max_hops: usize,
    #[arg(long, default_value_t = latsample_core::DEFAULT_CALIBRATION_TOLERANCE)]
    pub tolerance: f64,
    /// Mean service time used to turn stage means into link loads.
    #[arg(long, default_value_t = latsample_core::DEFAULT_SERVICE_TIME_US)]
    pub service_time: f64,
    /// Name prefix for the emitted nodes and links.
    #[arg(long, default_value = "cal")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub topology: PathBuf,
    #[arg(long)]
    pub source: String,
    #[arg(long)]
    pub destination: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; defaults to metro-synthetic.toml in the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
