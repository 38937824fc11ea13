//! `reid`: feature fusion, subspace learning, matching and evaluation from
//! the command line.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (",
    env!("REID_BUILD_TARGET"),
    ", ",
    env!("REID_BUILD_PROFILE"),
    ")"
);

#[derive(Debug, Parser)]
#[command(name = "reid", version = VERSION, about = "Tensor feature fusion and cross-view subspace learning for person re-identification")]
struct Cli {
    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// More log output on standard error (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Only log errors.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fuse feature files into one third-order tensor (TSR3) with a JSON sidecar.
    Fuse(FuseArgs),
    /// Learn the two projections from a fused tensor and its labels.
    Train(TrainArgs),
    /// Project a tensor with a trained model.
    Transform(TransformArgs),
    /// Rank probes against a gallery by cosine similarity and compute the CMC curve.
    Rank(RankArgs),
    /// Run the repeated-split experiment and write tables, curves and a summary.
    Evaluate(EvaluateArgs),
    /// Write synthetic feature and label files.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct FuseArgs {
    /// Feature file (repeat for several blocks; fused in the given order).
    #[arg(long = "features", short = 'f', required = true)]
    features: Vec<PathBuf>,
    /// Label file with one `sample_id,person_id,camera_id` line per sample.
    #[arg(long, short = 'l')]
    labels: PathBuf,
    /// Output tensor; the sidecar goes to `<out>.json`.
    #[arg(long, short = 'o')]
    out: PathBuf,
    /// Number of parts each feature vector is split into.
    #[arg(long, default_value_t = 4)]
    parts: usize,
    /// Skip per-vector L2 normalization.
    #[arg(long)]
    no_normalize: bool,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Fused training tensor (TSR3).
    #[arg(long, short = 't')]
    tensor: PathBuf,
    #[arg(long, short = 'l')]
    labels: PathBuf,
    /// Output model file.
    #[arg(long, short = 'o')]
    out: PathBuf,
    /// Reduced size: `auto`, `S` (mode 1 only) or `SxN`.
    #[arg(long)]
    dims: Option<String>,
    /// Ridge on the intrinsic scatter (default: automatic).
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// `trace_ratio` or `ratio_trace`.
    #[arg(long)]
    solver: Option<String>,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[arg(long, short = 'm')]
    model: PathBuf,
    #[arg(long, short = 't')]
    tensor: PathBuf,
    #[arg(long, short = 'o')]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[arg(long)]
    gallery: PathBuf,
    #[arg(long)]
    gallery_labels: PathBuf,
    #[arg(long)]
    probes: PathBuf,
    #[arg(long)]
    probe_labels: PathBuf,
    /// Directory for `ranking.csv` and `cmc.csv`.
    #[arg(long, short = 'o')]
    out_dir: PathBuf,
    /// Also write `cmc_plot.csv` with ranks 1 to 20.
    #[arg(long)]
    emit_plot_data: bool,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long = "features", short = 'f', required = true)]
    features: Vec<PathBuf>,
    #[arg(long, short = 'l')]
    labels: PathBuf,
    /// Experiment configuration (TOML, or JSON by extension).
    #[arg(long, short = 'c')]
    config: Option<PathBuf>,
    /// Configuration override `key=value`, e.g. `txqda.lambda=0.01` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated dimension sweep, e.g. `auto,16,32x4`.
    #[arg(long)]
    dims: Option<String>,
    /// Also evaluate cosine matching without learning (row `raw`).
    #[arg(long)]
    baseline: bool,
    #[arg(long, short = 'o')]
    out_dir: PathBuf,
    /// Also write `cmc_plot.csv` with ranks 1 to 20 per feature set and dimension.
    #[arg(long)]
    emit_plot_data: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Directory receiving `x.feat`, `y.feat`, `labels.csv` and `spec.json`.
    #[arg(long, short = 'o')]
    out_dir: PathBuf,
    /// Generator parameters (TOML, or JSON by extension).
    #[arg(long, short = 'c')]
    config: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(reid_core::Error),
}

impl From<reid_core::Error> for CliError {
    fn from(e: reid_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(reid_core::Error::Numeric { .. }) => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.quiet {
        log::LevelFilter::Error
    } else {
        match cli.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            2 => log::LevelFilter::Debug,
            _ => log::LevelFilter::Trace,
        }
    };
    env_logger::Builder::new().filter_level(level).parse_env("REID_LOG").format_timestamp(None).init();

    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("usage error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }

    let result = match cli.command {
        Command::Fuse(a) => commands::fuse(a),
        Command::Train(a) => commands::train(a),
        Command::Transform(a) => commands::transform(a),
        Command::Rank(a) => commands::rank(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Synth(a) => commands::synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
