use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lively_core::spectral::DEFAULT_GROUPING_TOL;
use lively_core::{SchedulePolicy, SpectrumMethod};

#[derive(Debug, Parser)]
#[command(
    name = "lively",
    version,
    about = "Simulate and analyse lively quantum walks on cycles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Position distribution after a number of steps.
    Evolve(EvolveArgs),
    /// Limiting (time-averaged) position distribution.
    Limiting(LimitingArgs),
    /// Periodicity check of the limiting distribution.
    Periodicity(PeriodicityArgs),
    /// Mean-position drift and coin marginal of the mixed-coin walker.
    Trapping(TrappingArgs),
    /// Limiting distribution with one ring edge removed.
    Broken(BrokenArgs),
    /// Chernoff information between intact and broken-link distributions.
    Detect(DetectArgs),
    /// Eigenphases of the walk operator.
    Spectrum(SpectrumArgs),
    /// Execute a JSON scenario file.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Policy {
    #[default]
    Cycle,
    RepeatLast,
}

impl From<Policy> for SchedulePolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Cycle => SchedulePolicy::Cycle,
            Policy::RepeatLast => SchedulePolicy::RepeatLast,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Method {
    #[default]
    Spectral,
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Source {
    #[default]
    Auto,
    Fourier,
    Dense,
}

impl From<Source> for SpectrumMethod {
    fn from(s: Source) -> Self {
        match s {
            Source::Auto => SpectrumMethod::Auto,
            Source::Fourier => SpectrumMethod::Fourier,
            Source::Dense => SpectrumMethod::Dense,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    /// Number of cycle nodes.
    #[arg(long)]
    pub n: Option<usize>,
    /// Liveliness (chord length of the third coin direction).
    #[arg(long)]
    pub a: Option<usize>,
    /// grover | identity | custom:<file> | schedule:<file>
    #[arg(long, default_value = "grover")]
    pub coin: String,
    /// How a coin schedule continues past its end.
    #[arg(long, value_enum, default_value_t)]
    pub schedule_policy: Policy,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// uniform-coin:<x0> | basis:<c>,<x0> | mixed-coin:<x0> | custom:<file>
    #[arg(long, default_value = "uniform-coin:0")]
    pub initial: String,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectralArgs {
    /// Eigenphase clustering tolerance.
    #[arg(long, default_value_t = DEFAULT_GROUPING_TOL)]
    pub grouping_tol: f64,
    /// Diagonalization route.
    #[arg(long, value_enum, default_value_t)]
    pub source: Source,
}

#[derive(Debug, Clone, Args)]
pub struct AverageArgs {
    #[arg(long, value_enum, default_value_t)]
    pub method: Method,
    /// Number of steps N for `--method average`.
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub state: StateArgs,
    /// Remove ring edge (b, b+1).
    #[arg(long)]
    pub edge: Option<usize>,
    #[arg(long)]
    pub steps: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LimitingArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub state: StateArgs,
    /// Remove ring edge (b, b+1).
    #[arg(long)]
    pub edge: Option<usize>,
    #[command(flatten)]
    pub average: AverageArgs,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BrokenArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub state: StateArgs,
    /// Remove ring edge (b, b+1).
    #[arg(long)]
    pub edge: usize,
    #[command(flatten)]
    pub average: AverageArgs,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PeriodicityArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub edge: Option<usize>,
    /// Candidate period; defaults to gcd(a, n).
    #[arg(long)]
    pub g: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub average: AverageArgs,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TrappingArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    /// Starting node of the mixed-coin walker.
    #[arg(long)]
    pub x0: usize,
    #[arg(long)]
    pub steps: usize,
    /// Draw a random coin for every step from this seed (overrides --coin).
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub edge: Option<usize>,
    /// Intact distribution file; with --p1 skips the walk computation.
    #[arg(long, requires = "p1")]
    pub p0: Option<PathBuf>,
    /// Broken-link distribution file.
    #[arg(long, requires = "p0")]
    pub p1: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_GROUPING_TOL)]
    pub grouping_tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long)]
    pub edge: Option<usize>,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Scenario file.
    pub scenario: PathBuf,
}
