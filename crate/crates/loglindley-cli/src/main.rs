//! `loglindley` — command-line inference for the log-Lindley distribution.
//!
//! Subcommands: `fit` (one-sample estimation), `reliability` (two-group
//! stress-strength analysis with discrepancy), `simulate` (Monte Carlo study
//! tables from a config file), `trace` (Metropolis cross-check draws), and
//! `generate` (synthetic datasets).  Every command is deterministic given its
//! seed.  Exit codes: 0 success, 2 input error, 3 convergence failure.

mod commands;
mod data;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Input / usage problems exit with 2, convergence failures with 3.
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    pub fn convergence(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }
}

impl From<loglindley::Error> for CliError {
    fn from(e: loglindley::Error) -> Self {
        match e {
            loglindley::Error::Convergence(_) => CliError::convergence(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(format!("I/O error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "loglindley", version, about = "Inference for the log-Lindley distribution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one sample (CSV with a `value` header) by maximum likelihood or
    /// the closed-form Bayesian posterior.
    Fit(FitArgs),
    /// Two-group stress-strength analysis: R = P(stress < strength) and the
    /// discrepancy D = 1 - 2R, from a CSV with a `group,value` header.
    Reliability(ReliabilityArgs),
    /// Run the Monte Carlo study described by a TOML or JSON config file,
    /// writing CSV tables and a JSON manifest.
    Simulate(SimulateArgs),
    /// Export Metropolis cross-check draws (and exact-sampler draws) for a
    /// one-sample posterior, with convergence diagnostics.
    Trace(TraceArgs),
    /// Generate synthetic data from given parameters.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Ml,
    Bayes,
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV with a `value` header.
    input: PathBuf,
    /// Estimation method.
    #[arg(long, value_enum, default_value = "ml")]
    method: Method,
    /// Divide every input value by this before validation (e.g. 100).
    #[arg(long)]
    scale: Option<f64>,
    /// Confidence / credibility level.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Gamma-prior rate on sigma (Bayes only).
    #[arg(long, default_value_t = 1.0)]
    prior_tau: f64,
    /// Gamma-prior shape on sigma (Bayes only).
    #[arg(long, default_value_t = 1.0)]
    prior_delta: f64,
    /// Beta-prior first parameter on pi (Bayes only).
    #[arg(long, default_value_t = 1.0)]
    prior_alpha: f64,
    /// Beta-prior second parameter on pi (Bayes only).
    #[arg(long, default_value_t = 1.0)]
    prior_beta: f64,
    /// Accepted for interface uniformity; fitting is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the full-precision JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReliabilityArgs {
    /// Input CSV with a `group,value` header and exactly two groups.
    input: PathBuf,
    /// Estimation method.
    #[arg(long, value_enum, default_value = "ml")]
    method: Method,
    /// Which group label plays the strength role X (default: the label of
    /// the first data row).
    #[arg(long)]
    strength_group: Option<String>,
    /// Divide every input value by this before validation.
    #[arg(long)]
    scale: Option<f64>,
    /// Confidence / credibility level.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Posterior draws for the Bayesian estimate.
    #[arg(long, default_value_t = 10000)]
    draws: usize,
    /// Seed for posterior draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Strength-group prior: Gamma rate on sigma.
    #[arg(long, default_value_t = 1.0)]
    prior_tau_x: f64,
    /// Strength-group prior: Gamma shape on sigma.
    #[arg(long, default_value_t = 1.0)]
    prior_delta_x: f64,
    /// Strength-group prior: Beta first parameter on pi.
    #[arg(long, default_value_t = 1.0)]
    prior_alpha_x: f64,
    /// Strength-group prior: Beta second parameter on pi.
    #[arg(long, default_value_t = 1.0)]
    prior_beta_x: f64,
    /// Stress-group prior: Gamma rate on sigma.
    #[arg(long, default_value_t = 1.0)]
    prior_tau_y: f64,
    /// Stress-group prior: Gamma shape on sigma.
    #[arg(long, default_value_t = 1.0)]
    prior_delta_y: f64,
    /// Stress-group prior: Beta first parameter on pi.
    #[arg(long, default_value_t = 1.0)]
    prior_alpha_y: f64,
    /// Stress-group prior: Beta second parameter on pi.
    #[arg(long, default_value_t = 1.0)]
    prior_beta_y: f64,
    /// Write the full-precision JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Study configuration (.toml or .json).
    config: PathBuf,
    /// Directory for the CSV tables and manifest.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct TraceArgs {
    /// Input CSV with a `value` header.
    input: PathBuf,
    /// Divide every input value by this before validation.
    #[arg(long)]
    scale: Option<f64>,
    /// Number of chains (diagnostics need at least 2).
    #[arg(long, default_value_t = 4)]
    chains: usize,
    /// Kept draws per chain.
    #[arg(long, default_value_t = 2500)]
    draws: usize,
    /// Warmup iterations per chain.
    #[arg(long, default_value_t = 1000)]
    warmup: usize,
    /// Seed for the chains (and the exact-sampler comparison draws).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gamma-prior rate on sigma.
    #[arg(long, default_value_t = 1.0)]
    prior_tau: f64,
    /// Gamma-prior shape on sigma.
    #[arg(long, default_value_t = 1.0)]
    prior_delta: f64,
    /// Beta-prior first parameter on pi.
    #[arg(long, default_value_t = 1.0)]
    prior_alpha: f64,
    /// Beta-prior second parameter on pi.
    #[arg(long, default_value_t = 1.0)]
    prior_beta: f64,
    /// Trace CSV destination.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    /// Shape of the (first) distribution.
    #[arg(long)]
    sigma: f64,
    /// Weight of the (first) distribution.
    #[arg(long)]
    pi: f64,
    /// Sample size for the (first) group.
    #[arg(short, long)]
    m: usize,
    /// Shape of the second distribution (two-group output when present,
    /// together with --pi2 and -n).
    #[arg(long, requires = "pi2", requires = "n")]
    sigma2: Option<f64>,
    /// Weight of the second distribution.
    #[arg(long)]
    pi2: Option<f64>,
    /// Sample size for the second group.
    #[arg(short, long)]
    n: Option<usize>,
    /// Seed for the draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fit(args) => commands::fit(&args),
        Command::Reliability(args) => commands::reliability(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Trace(args) => commands::trace(&args),
        Command::Generate(args) => commands::generate(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::CliError;

    #[test]
    fn convergence_failures_map_to_exit_three() {
        let err = CliError::from(loglindley::Error::Convergence("optimizer stalled".into()));
        assert_eq!(err.code, 3);
        let err =
            CliError::from(loglindley::Error::InvalidParameters("sigma must be positive".into()));
        assert_eq!(err.code, 2);
    }
}
