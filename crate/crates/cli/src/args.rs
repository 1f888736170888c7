use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mm1ps",
    version,
    about = "Conditional sojourn-time densities for the M/M/1 processor-sharing queue"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate p(t|x) by exact inversion or an asymptotic formula.
    Density(DensityArgs),
    /// Recompute the dominant-singularity table.
    Table1(Table1Args),
    /// Tail constants of the unconditional sojourn time.
    Tail(TailArgs),
    /// Monte Carlo estimate of the conditional sojourn time.
    Simulate(SimulateArgs),
    /// Cross-check asymptotic formulas against each other and exact inversion.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Auto,
    #[value(name = "T1-case1")]
    T1Case1,
    #[value(name = "T1-case2")]
    T1Case2,
    #[value(name = "T1-case3")]
    T1Case3,
    #[value(name = "T1-case4")]
    T1Case4,
    #[value(name = "T2-case1")]
    T2Case1,
    #[value(name = "T2-case2")]
    T2Case2,
    #[value(name = "T2-case3")]
    T2Case3,
    #[value(name = "T2-case4")]
    T2Case4,
    #[value(name = "T2-case5")]
    T2Case5,
    #[value(name = "T2-case6")]
    T2Case6,
    #[value(name = "T2-sigma")]
    T2Sigma,
    #[value(name = "match")]
    Match,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Auto => "auto",
            Method::T1Case1 => "T1-case1",
            Method::T1Case2 => "T1-case2",
            Method::T1Case3 => "T1-case3",
            Method::T1Case4 => "T1-case4",
            Method::T2Case1 => "T2-case1",
            Method::T2Case2 => "T2-case2",
            Method::T2Case3 => "T2-case3",
            Method::T2Case4 => "T2-case4",
            Method::T2Case5 => "T2-case5",
            Method::T2Case6 => "T2-case6",
            Method::T2Sigma => "T2-sigma",
            Method::Match => "match",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case6Arg {
    Integral,
    #[value(name = "pcf_series")]
    PcfSeries,
    Spectral,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub rho: f64,
    #[arg(long)]
    pub x: f64,
    /// Single time point.
    #[arg(long, conflicts_with = "t_grid", required_unless_present = "t_grid")]
    pub t: Option<f64>,
    /// Evenly spaced times, start:stop:count.
    #[arg(long)]
    pub t_grid: Option<String>,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: Method,
    /// Representation used by T2-case6.
    #[arg(long, value_enum, default_value = "integral")]
    pub case6_form: Case6Arg,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Comma-separated ρ values.
    #[arg(long, value_delimiter = ',')]
    pub rho_list: Option<Vec<f64>>,
    /// Comma-separated x values.
    #[arg(long, value_delimiter = ',')]
    pub x_list: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[arg(long, conflicts_with = "eps", required_unless_present = "eps")]
    pub rho: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub rho: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long, default_value_t = 100_000)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Density estimate on start:stop:count.
    #[arg(long)]
    pub grid: Option<String>,
    /// Histogram bin width for the density estimate.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_events: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Theorem1,
    Theorem2,
    Matching,
    All,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}
