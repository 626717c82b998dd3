use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use factorboot::WeightScheme;

#[derive(Debug, Parser)]
#[command(name = "factorboot", version, about = "Bootstrap estimation of the number of factors")]
pub struct Cli {
    /// Worker threads for the bootstrap (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the number of factors in a CSV panel.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo study on simulated factor panels.
    Simulate(SimulateArgs),
    /// Check a limit theorem or the weight-scheme ordering by simulation.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Smd,
    Ssd,
    Etmd,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Multiplier,
    Standard,
    Poisson,
    Uniform,
    Chisq,
}

impl From<SchemeArg> for WeightScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Multiplier => WeightScheme::Multiplier,
            SchemeArg::Standard => WeightScheme::Standard,
            SchemeArg::Poisson => WeightScheme::Poisson,
            SchemeArg::Uniform => WeightScheme::Uniform,
            SchemeArg::Chisq => WeightScheme::ChiSquare,
        }
    }
}

/// Tuning flags shared by `estimate` and `simulate`.
#[derive(Debug, Clone, Args)]
pub struct TuningArgs {
    /// Significance level of each test.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Bootstrap replicates per decision.
    #[arg(long = "B", value_name = "B")]
    pub b: Option<usize>,
    /// Null draws for the thresholding critical value.
    #[arg(long = "R", value_name = "R")]
    pub r: Option<usize>,
    /// Largest number of factors tested.
    #[arg(long)]
    pub rmax: Option<usize>,
    /// Decision threshold on the acceptance fraction (default (1 - alpha) / 2).
    #[arg(long = "c-th")]
    pub c_th: Option<f64>,
    /// Weight scheme of the thresholding method.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// CSV file (rows are observations, columns are variables); `-` reads stdin.
    pub input: PathBuf,
    /// Treat CSV rows as variables and columns as observations.
    #[arg(long)]
    pub transpose: bool,
    /// Methods to run; repeat or comma-separate.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub method: Vec<MethodArg>,
    #[command(flatten)]
    pub tuning: TuningArgs,
    /// Master seed; drawn from system entropy and reported when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Center and scale every variable before estimation.
    #[arg(long)]
    pub standardize: bool,
    /// Fill missing cells by linear interpolation instead of failing.
    #[arg(long)]
    pub impute: bool,
    /// Record wall-clock time per method.
    #[arg(long)]
    pub timings: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML study description; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Factor strength grid.
    #[arg(long, value_delimiter = ',')]
    pub vartheta: Option<Vec<f64>>,
    /// Cross-sectional noise correlation grid.
    #[arg(long, value_delimiter = ',')]
    pub rho: Option<Vec<f64>>,
    /// Loading sparsity exponent grid.
    #[arg(long, value_delimiter = ',')]
    pub a: Option<Vec<f64>>,
    /// Sample sizes; the cross-section matches unless `--p` is given.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Cross-sections paired with `--n` (same length).
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<usize>>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Methods among SMD, SSD, ETMD, ER, IC.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub tuning: TuningArgs,
    /// Directory for summary.csv and summary.json (stdout CSV otherwise).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    /// Spiked bootstrap statistic against N(0, 1).
    Gaussian,
    /// Largest bootstrapped null eigenvalue against the Gumbel law.
    Gumbel,
    /// Bootstrap versus sampling distribution of a spiked eigenvalue.
    Bias,
    /// Ordering of detection boundaries across weight schemes.
    Weights,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub kind: VerifyKind,
    /// Sample size (cross-section defaults to the same).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    /// Simulated panels (gaussian, bias, weights) or bootstrap draws (gumbel).
    #[arg(long)]
    pub reps: Option<usize>,
    /// Bootstrap replicates per panel.
    #[arg(long = "B", value_name = "B")]
    pub b: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// 1-based eigenvalue index (gaussian, bias).
    #[arg(long)]
    pub index: Option<usize>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long)]
    pub vartheta: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    /// Pass/fail tolerance on the reported distance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the curve table as CSV here.
    #[arg(long)]
    pub curve: Option<PathBuf>,
}
