use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

/// Bayesian mean-variance portfolio selection from historical returns.
#[derive(Debug, Parser)]
#[command(name = "bayesmv", version, about)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// CSV file of per-period returns: a header row of asset labels
    /// (optionally preceded by a date-column header), then one row per
    /// period, oldest first.
    #[arg(long, global = true, value_name = "PATH")]
    pub input: Option<PathBuf>,

    /// Treat the input as adjusted prices and convert to simple returns
    /// p_t/p_{t-1} - 1 before analysis.
    #[arg(long, global = true)]
    pub prices: bool,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Seed for the sampling commands. Falls back to the BAYESMV_SEED
    /// environment variable, then to 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print sample moments (mean, scatter) and the variance coefficients.
    Estimate,
    /// Solve for optimal weights at a risk aversion, target return, or
    /// target variance.
    Optimize(OptimizeArgs),
    /// Emit efficient-frontier parameters and plot-ready curves.
    Frontier(FrontierArgs),
    /// Draw from the posterior predictive distribution of a portfolio's
    /// next-period return.
    Sample(SampleArgs),
    /// Tabulate equal-tailed credible intervals across risk aversions.
    Interval(IntervalArgs),
    /// Pair Bayesian and sample-rule (return, variance) points across risk
    /// aversions and universe sizes.
    Compare(CompareArgs),
    /// Tabulate the posterior/sample variance inflation ratio c/d over a
    /// k/n grid. Needs no input file.
    Ratio(RatioArgs),
}

#[derive(Clone, Copy, Debug, Eq, PartialEq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Eq, PartialEq, ValueEnum)]
pub enum RuleChoice {
    /// Posterior predictive rule (coefficient c).
    Bayes,
    /// Plug-in sample rule (coefficient d).
    Sample,
    /// Both rules side by side.
    Both,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true)))]
pub struct OptimizeArgs {
    /// Risk-aversion coefficient, > 0.
    #[arg(long, group = "target", value_name = "GAMMA", allow_negative_numbers = true)]
    pub gamma: Option<f64>,

    /// Expected-return target (Bayes rule only).
    #[arg(long, group = "target", value_name = "R0", allow_negative_numbers = true)]
    pub target_return: Option<f64>,

    /// Variance target (Bayes rule only).
    #[arg(long, group = "target", value_name = "V0", allow_negative_numbers = true)]
    pub target_variance: Option<f64>,

    /// Which rule family to solve. `sample` and `both` need --gamma.
    #[arg(long, value_enum, default_value_t = RuleChoice::Bayes)]
    pub rule: RuleChoice,
}

#[derive(Debug, Args)]
pub struct FrontierArgs {
    /// Which frontier family to emit.
    #[arg(long, value_enum, default_value_t = RuleChoice::Both)]
    pub rule: RuleChoice,

    /// Number of grid points per curve, spanning [v_gmv, 5 v_gmv].
    #[arg(long, default_value_t = 100)]
    pub grid_points: usize,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Risk aversion of the Bayes-rule portfolio whose return is sampled.
    #[arg(long, value_name = "GAMMA", allow_negative_numbers = true)]
    pub gamma: f64,

    /// Number of Monte Carlo draws.
    #[arg(long, value_name = "B", default_value_t = 100_000)]
    pub draws: usize,

    /// Worker threads for the draw loop; output is identical for any value.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,

    /// Include every raw draw in the report, not only summary statistics.
    #[arg(long)]
    pub emit_draws: bool,
}

#[derive(Debug, Args)]
pub struct IntervalArgs {
    /// Comma-separated risk aversions, one interval row each.
    #[arg(
        long = "gamma",
        value_name = "LIST",
        value_delimiter = ',',
        default_value = "10,20,30,40,50,60,70,80,90,100"
    )]
    pub gamma: Vec<f64>,

    /// Tail mass: 0.05 gives equal-tailed 95% intervals.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,

    /// Number of Monte Carlo draws per row.
    #[arg(long, value_name = "B", default_value_t = 100_000)]
    pub draws: usize,

    /// Worker threads for the draw loops; output is identical for any value.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Comma-separated risk aversions.
    #[arg(
        long = "gamma",
        value_name = "LIST",
        value_delimiter = ',',
        default_value = "1,2,5,10,20,50,100"
    )]
    pub gamma: Vec<f64>,

    /// Comma-separated universe sizes; each entry uses the first k input
    /// columns. Defaults to all columns.
    #[arg(long = "k", value_name = "LIST", value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    /// Comma-separated sample sizes.
    #[arg(long = "n", value_name = "LIST", value_delimiter = ',', required = true)]
    pub n: Vec<usize>,

    /// Exclusive upper bound on k/n for the grid.
    #[arg(long, default_value_t = 0.95)]
    pub kn_max: f64,
}
