use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use deconflict::solve::AnnealSchedule;

#[derive(Parser, Debug)]
#[command(name = "deconflict", version, about = "Flight de-confliction as quadratic unconstrained binary optimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Detect conflicts and write them with a summary.
    Detect(DetectArgs),
    /// Conflict-graph statistics over one or more maximum delays.
    Stats(StatsArgs),
    /// Compile every non-trivial instance into a QUBO file.
    Build(BuildArgs),
    /// Compile and solve every non-trivial instance.
    Solve(SolveArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Trajectory CSV with header flight_id,time_min,lat_deg,lon_deg,alt_ft.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// JSON configuration of the synthetic corridor generator.
    #[arg(long)]
    pub synthetic: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Common {
    #[command(flatten)]
    pub source: Source,
    /// Horizontal separation, nautical miles.
    #[arg(long, default_value_t = 30.0)]
    pub horizontal_nm: f64,
    /// Temporal separation, minutes.
    #[arg(long, default_value_t = 3)]
    pub temporal_min: i64,
    /// Vertical separation, feet.
    #[arg(long, default_value_t = 2000.0)]
    pub vertical_ft: f64,
    /// Root seed; synthetic generation and annealing draw named sub-seeds from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    #[command(flatten)]
    pub common: Common,
    /// Maximum departure delay, minutes.
    #[arg(long, default_value_t = 18)]
    pub dmax: i64,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(flatten)]
    pub common: Common,
    /// Maximum delays to analyse, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "18")]
    pub dmax: Vec<i64>,
    /// Smallest component size entering the treewidth slope.
    #[arg(long, default_value_t = 50)]
    pub min_size: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Departure,
    Global,
    Exclusive,
    Flexible,
    Interstitial,
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    /// Maximum departure delay, minutes; also the detection window.
    #[arg(long, default_value_t = 18)]
    pub dmax: i64,
    /// Delay step, minutes; must divide the maximum delay.
    #[arg(long = "delta-d", default_value_t = 3)]
    pub delta_d: i64,
    #[arg(long, value_enum, default_value_t = ModelKind::Departure)]
    pub model: ModelKind,
    /// `auto` or `<encoding>,<conflict>,<consistency>`.
    #[arg(long, default_value = "auto")]
    pub weights: String,
    /// Maneuver delay at every conflict for both flights (exclusive, flexible).
    #[arg(long)]
    pub maneuver_delay: Option<i64>,
    /// Let both flights maneuver at the same conflict (flexible).
    #[arg(long)]
    pub allow_both: bool,
    /// Largest delay a flight may absorb between consecutive conflicts (interstitial).
    #[arg(long)]
    pub bound: Option<i64>,
    /// Explicit global model JSON; only valid when there is a single instance.
    #[arg(long)]
    pub global_model: Option<PathBuf>,
    /// Keep components whose conflicts are avoided without any delay.
    #[arg(long)]
    pub include_trivial: bool,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    /// Exhaustive search, at most 30 variables.
    Exact,
    /// Simulated annealing.
    Sa,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = SolverKind::Exact)]
    pub solver: SolverKind,
    #[arg(long, default_value_t = AnnealSchedule::default().sweeps)]
    pub sweeps: usize,
    #[arg(long, default_value_t = AnnealSchedule::default().restarts)]
    pub restarts: usize,
    /// Delay steps of the discretization sweep (departure model), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sweep_delta_d: Vec<i64>,
    /// Maximum delays of the discretization sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sweep_dmax: Vec<i64>,
    /// Weights of the penalty validity map (used for both conflict and encoding), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub validity_grid: Vec<f64>,
    /// Annealing trials per instance for the success-probability report.
    #[arg(long, default_value_t = 0)]
    pub tts_trials: usize,
}
