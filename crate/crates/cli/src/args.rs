use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ramsey-moments",
    version,
    about = "Exact and empirical moments of the number of monochromatic k-cliques in a random 2-coloring of K_n",
    after_help = "Exit status: 0 success, 1 domain or regime error (or a failed verify check), 2 usage error, 3 resource guard tripped."
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags accepted by every subcommand. Unset values fall back to the config
/// file, then to built-in defaults.
#[derive(Debug, Args, Default)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, value_name = "MODE")]
    pub output: Option<OutputMode>,
    /// Shorthand for --output json.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Shorthand for --output csv.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Bits of precision for irrational values such as standardized moments (at least 64).
    #[arg(long, global = true, value_name = "BITS")]
    pub precision: Option<u32>,
    /// Maximum overlap-profile nodes the moment engine may visit.
    #[arg(long, global = true, value_name = "NODES")]
    pub cap_profile_nodes: Option<u64>,
    /// Largest n the exhaustive oracle accepts (7 by default, 8 at most).
    #[arg(long, global = true, value_name = "N")]
    pub cap_oracle_n: Option<u32>,
    /// Maximum samples * C(n,k) subset tests a simulation may perform.
    #[arg(long, global = true, value_name = "COST")]
    pub cap_subset_cost: Option<f64>,
    /// Seed for the simulator's random streams.
    #[arg(long, global = true, value_name = "SEED")]
    pub seed: Option<u64>,
    /// key=value file supplying defaults for the global flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Pretty,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Raw, factorial or binomial moment of X as an exact polynomial in n.
    Moments(MomentsArgs),
    /// Central moment E[(X - mu)^m] as an exact polynomial in n.
    Central(CentralArgs),
    /// Exact distribution of X by enumerating every coloring of K_n.
    Oracle(OracleArgs),
    /// Poisson, negative binomial and Delaporte pmf, mgf and moments.
    Dist(DistArgs),
    /// Delaporte or Poisson parameters for a (k, n) regime.
    Fit(FitArgs),
    /// Ramsey lower bounds from truncated inclusion-exclusion, plus related ratios.
    Bounds(BoundsArgs),
    /// Monte Carlo histogram of X with optional model fits.
    Simulate(SimulateArgs),
    /// Run the identity suite; exits 0 only if every check passes.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Monomial,
    /// Falling factorials (n)_m.
    Ff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MomentFamily {
    /// E[X^r]
    Raw,
    /// E[(X)_r]
    Factorial,
    /// E[C(X, r)]
    Binomial,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Clique size.
    #[arg(long)]
    pub k: u32,
    /// Moment order.
    #[arg(long)]
    pub r: u32,
    /// Basis for the printed polynomial.
    #[arg(long, value_enum, default_value = "monomial")]
    pub basis: BasisArg,
    /// Which moment of X.
    #[arg(long, value_enum, default_value = "raw")]
    pub family: MomentFamily,
    /// Evaluate the polynomial exactly at these n (CSV then lists the values instead of coefficients).
    #[arg(long = "eval-n", value_name = "N", num_args = 1.., allow_negative_numbers = true)]
    pub eval_n: Vec<i64>,
}

#[derive(Debug, Args)]
pub struct CentralArgs {
    /// Clique size.
    #[arg(long)]
    pub k: u32,
    /// Central moment order.
    #[arg(long)]
    pub m: u32,
    /// Compare the leading term with the closed-form prediction (m = 2..5, k >= 3).
    #[arg(long)]
    pub leading: bool,
    /// Evaluate exactly at these n, with the standardized moment c_m.
    #[arg(long = "eval-n", value_name = "N", num_args = 1.., allow_negative_numbers = true)]
    pub eval_n: Vec<i64>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Number of vertices.
    #[arg(long)]
    pub n: u32,
    /// Clique size.
    #[arg(long)]
    pub k: u32,
    /// Report raw moments E[X^r] for r = 1..=R.
    #[arg(long, default_value_t = 5, value_name = "R")]
    pub max_r: u32,
    /// Enumerate only colorings with the first edge fixed and double the counts.
    #[arg(long)]
    pub symmetry: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistQuery {
    Pmf,
    Mgf,
    Moments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistFamily {
    Delaporte,
    Poisson,
    Negbin,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// What to compute.
    #[arg(value_enum)]
    pub query: DistQuery,
    /// Distribution family.
    #[arg(value_enum)]
    pub family: DistFamily,
    /// Poisson rate (poisson, delaporte).
    #[arg(long, value_name = "L", allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Negative binomial shape (negbin, delaporte).
    #[arg(long, value_name = "A", allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Negative binomial scale (negbin, delaporte).
    #[arg(long, value_name = "B", allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Largest j for pmf output; default is the truncation bound, at most 200.
    #[arg(long, value_name = "J")]
    pub max_j: Option<u64>,
    /// Argument of the mgf E[e^{tX}].
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Regime {
    /// Delaporte from the leading moment terms.
    Big,
    /// Poisson with rate E[X].
    Small,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Clique size.
    #[arg(long)]
    pub k: u32,
    /// Number of vertices.
    #[arg(long)]
    pub n: u64,
    /// Which regime's parameters to produce.
    #[arg(long, value_enum)]
    pub regime: Regime,
    /// c in the big-n boundary n >= c k 2^{k/2}; default 2/e.
    #[arg(long, value_name = "C", allow_negative_numbers = true)]
    pub boundary_constant: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Clique size.
    #[arg(long)]
    pub k: u32,
    /// Odd truncation orders, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1", value_name = "M")]
    pub m: Vec<u32>,
    /// Also report Var(X)/E[X]^2 and Var(X)/E[X] at --n.
    #[arg(long, requires = "n")]
    pub chebyshev: bool,
    /// Number of vertices for --chebyshev.
    #[arg(long)]
    pub n: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Delaporte,
    /// Delaporte with the big-n leading-term parameters.
    DelaporteBigN,
    Poisson,
    Normal,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number of vertices.
    #[arg(long)]
    pub n: u32,
    /// Clique size.
    #[arg(long)]
    pub k: u32,
    /// Number of sampled colorings.
    #[arg(long)]
    pub samples: u64,
    /// Worker threads; 0 uses all cores. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Models to fit to the histogram, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', value_name = "MODELS")]
    pub fit: Vec<ModelArg>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run only these checks, comma separated (see --list).
    #[arg(long, value_delimiter = ',', value_name = "CHECKS")]
    pub only: Vec<String>,
    /// Print the check names and exit.
    #[arg(long)]
    pub list: bool,
}
