mod commands;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "neurochaos", version, about = "Cause-effect classification and causality on coupled time series")]
struct Cli {
    /// Repeat for more log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate coupled master/slave trials into a directory of CSVs.
    Generate(GenerateArgs),
    /// Write per-stimulus firing features for every trial series.
    Features(FeaturesArgs),
    /// Fit a ChaosNet model on a trial directory.
    Train(TrainArgs),
    /// Score a ChaosNet model on a trial directory.
    Evaluate(EvaluateArgs),
    /// Train the baseline network on a trial directory.
    MlpTrain(TrainArgs),
    /// Score a baseline network on a trial directory.
    MlpEval(EvaluateArgs),
    /// Dump hidden-layer activations of a baseline network.
    MlpActivations(ActivationsArgs),
    /// Granger causality F-statistics per trial and direction.
    Gc(GcArgs),
    /// Compression-complexity causality per trial and direction.
    Ccc(CccArgs),
    /// Cross-validated search over the initial neural activity q.
    Tune(TuneArgs),
    /// Macro F1 against coupling strength.
    Sweep(SweepArgs),
    /// Train on the reference tent pair, test on other systems.
    Transfer(TransferArgs),
    /// CCC on a prey-predator population CSV.
    PreyPredator(PreyPredatorArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SystemArg {
    Ar,
    Tent,
    Logistic,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    system: SystemArg,
    /// Coupling strengths; eta number `i` is seeded with `seed + i`.
    #[arg(long, value_delimiter = ',', required = true)]
    eta: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 2000)]
    length: usize,
    #[arg(long, default_value_t = 500)]
    transient: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Part {
    /// Every master and slave in the directory.
    All,
    Train,
    Test,
}

/// Which instances of a trial directory to use.
#[derive(Debug, Args)]
struct Selection {
    /// Restrict to one eta subdirectory.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, value_enum, default_value_t = Part::All)]
    part: Part,
    /// Seed of the train/test split used by `--part`.
    #[arg(long, default_value_t = 42)]
    split_seed: u64,
}

#[derive(Debug, Args)]
struct FeaturesArgs {
    /// Experiment TOML supplying the neuron settings and normalization.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Trial directory written by `generate`.
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    selection: Selection,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    test: PathBuf,
    /// Per-class precision/recall/F1 CSV.
    #[arg(long)]
    report: PathBuf,
    #[command(flatten)]
    selection: Selection,
}

#[derive(Debug, Args)]
struct ActivationsArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    test: PathBuf,
    /// 1-based hidden layer.
    #[arg(long, default_value_t = 4)]
    layer: usize,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    selection: Selection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FeatureArg {
    Raw,
    FiringTime,
    MlpHidden,
}

#[derive(Debug, Args)]
struct GcArgs {
    #[arg(long)]
    dir: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    max_order: Option<usize>,
    #[arg(long, value_enum, default_value_t = FeatureArg::Raw)]
    feature: FeatureArg,
    /// Baseline network for `--feature mlp-hidden`.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    layer: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CccArgs {
    #[arg(long)]
    dir: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Past window length.
    #[arg(long = "L")]
    past: Option<usize>,
    /// Window step.
    #[arg(long = "w")]
    step: Option<usize>,
    /// Future window length.
    #[arg(long)]
    delta: Option<usize>,
    /// Number of symbol bins.
    #[arg(long = "B")]
    bins: Option<usize>,
    #[arg(long, value_enum, default_value_t = FeatureArg::Raw)]
    source: FeatureArg,
    #[arg(long)]
    out: PathBuf,
}

/// Overrides applied on top of the experiment TOML.
#[derive(Debug, Args)]
struct Overrides {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    etas: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct TuneArgs {
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long, default_value_t = 0.4)]
    eta: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long, default_value = "chaosnet")]
    method: neurochaos::harness::Method,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TransferArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// Cases to test (I, II, III, IV); all by default.
    #[arg(long, value_delimiter = ',')]
    case: Vec<neurochaos::harness::TransferCase>,
    #[arg(long, value_delimiter = ',', default_value = "chaosnet,mlp")]
    method: Vec<neurochaos::harness::Method>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PreyPredatorArgs {
    /// CSV with `time,prey,predator` columns.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.56)]
    q: f64,
    #[arg(long, default_value_t = 0.499)]
    b: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
}

fn main() {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Err(e) = commands::run(cli.command) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
