use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "salem", version, about = "Censuses of degree-4 Salem numbers")]
pub struct Cli {
    /// Write results to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,

    /// Worker threads (default: one per core).
    #[arg(long, global = true, env = "SALEM_WORKERS",
          value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    pub workers: Option<usize>,

    /// Seed for Monte Carlo checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Print the validated plan without enumerating.
    #[arg(long, global = true)]
    pub dry_run: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Salem numbers over the rationals.
    Census(CensusArgs),
    /// Salem numbers from the traces of PSL(2, O_K), K = Q(sqrt(-D)).
    Bianchi(BianchiArgs),
    /// Solutions of the inequality system over Q(sqrt(d)).
    Cocompact(CocompactArgs),
    /// Closed-form constants.
    Constants(ConstantsArgs),
    /// Power-law fit of a count series.
    Fit(FitArgs),
    /// Derived reports.
    Report {
        #[command(subcommand)]
        report: ReportCommand,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CensusKind {
    Deg4,
    Sr,
    Deg2,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(value_enum)]
    pub kind: CensusKind,

    #[arg(long)]
    pub qmax: i64,

    /// Print only the number of Salem numbers.
    #[arg(long)]
    pub count: bool,

    /// Emit `Q,count/Q^s` over a doubling grid ending at `--qmax`.
    #[arg(long)]
    pub plot_data: bool,
}

#[derive(Debug, Args)]
pub struct BianchiArgs {
    #[arg(long)]
    pub d: i64,

    #[arg(long)]
    pub qmax: i64,

    /// Print only the number of distinct Salem numbers.
    #[arg(long)]
    pub count: bool,

    /// Emit `Q,count/Q^(1/2)` over a doubling grid ending at `--qmax`.
    #[arg(long)]
    pub plot_data: bool,
}

#[derive(Debug, Args)]
pub struct CocompactArgs {
    #[arg(long)]
    pub field: i64,

    #[arg(long)]
    pub qmax: i64,

    /// Keep only solutions that define a Salem number over the field.
    #[arg(long)]
    pub verified: bool,

    /// Print only the number of solutions.
    #[arg(long)]
    pub count: bool,

    /// Emit `Q,count/Q^(3/2)` over a doubling grid ending at `--qmax`.
    #[arg(long)]
    pub plot_data: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("constant").required(true).args(["omega", "marklof_c", "c2_bound", "volume"])))]
pub struct ConstantsArgs {
    /// Exact omega_m.
    #[arg(long, value_name = "M")]
    pub omega: Option<u32>,

    /// Leading constant of the Bianchi length count for Q(sqrt(-D)).
    #[arg(long, value_name = "D")]
    pub marklof_c: Option<i64>,

    /// Upper bound for c2 over Q(sqrt(d)).
    #[arg(long, value_name = "d")]
    pub c2_bound: Option<i64>,

    /// Leading volume term of S_L(Q, delta).
    #[arg(long, requires = "qmax")]
    pub volume: bool,

    #[arg(long, default_value_t = 2)]
    pub h: u32,

    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,

    #[arg(long)]
    pub qmax: Option<f64>,

    /// Also estimate the volume with this many Monte Carlo samples.
    #[arg(long, value_name = "N", requires = "volume")]
    pub monte_carlo: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitKind {
    Deg4,
    Sr,
    Deg2,
    Bianchi,
    System,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["grid", "input"])))]
pub struct FitArgs {
    #[arg(value_enum)]
    pub kind: FitKind,

    /// Comma-separated Q values to count at.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<i64>,

    /// CSV file with columns `Q,count`.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Field parameter for `bianchi`.
    #[arg(long)]
    pub d: Option<i64>,

    /// Field parameter for `system`.
    #[arg(long)]
    pub field: Option<i64>,

    /// Emit the fitted `Q,count` points.
    #[arg(long)]
    pub plot_data: bool,
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    /// Lower bound for mean multiplicities in the length spectrum.
    Multiplicity(MultiplicityArgs),
}

#[derive(Debug, Args)]
pub struct MultiplicityArgs {
    /// Even dimension, at least 4.
    #[arg(long)]
    pub n: u32,

    #[arg(long)]
    pub ell_max: f64,

    #[arg(long, default_value_t = 1.0)]
    pub step: f64,

    /// Emit `ell,mean_mult_lower`.
    #[arg(long)]
    pub plot_data: bool,
}
