//! Command-line front end for `kzb-core`: special function values, identity
//! suites, parallel transport along path files and checks at a Weierstrass
//! frame.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::run;
pub use config::{parse_complex, Overrides, Settings};
pub use report::{Case, SuiteReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] kzb_core::Error),
}

impl CliError {
    /// 2 for bad input, 3 when a numerical guard (pole, singular frame,
    /// divergence) fired.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numeric_guard() => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kzb", version, about = "Elliptic KZB connection: special functions, identity checks, transport")]
pub struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Config file with `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Truncation degree N.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Relative cutoff for q-series terms.
    #[arg(long, global = true)]
    pub qtol: Option<f64>,
    /// Tolerance override: every case, or the transport refinement tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Step for finite differences.
    #[arg(long = "fd-step", global = true)]
    pub fd_step: Option<f64>,
    /// Number of random sample points per suite.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            degree: self.degree,
            qtol: self.qtol,
            tol: self.tol,
            fd_step: self.fd_step,
            points: self.points,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a special function.
    Specfun(SpecfunArgs),
    /// Run identity suites over seeded random points.
    Verify(VerifyArgs),
    /// Parallel transport along a path file.
    Transport(TransportArgs),
    /// Checks of the algebraic form at a Weierstrass frame.
    Ratcheck(RatcheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Function {
    /// theta(xi)
    #[value(name = "theta")]
    Theta,
    /// E_k(xi)
    #[value(name = "E")]
    BigE,
    /// e_k
    #[value(name = "e")]
    SmallE,
    /// Kronecker function F(xi, alpha)
    #[value(name = "F")]
    F,
    /// dF/dalpha
    #[value(name = "F2")]
    F2,
    /// Weierstrass wp(xi)
    #[value(name = "wp")]
    Wp,
}

#[derive(Debug, Args)]
pub struct SpecfunArgs {
    #[arg(long = "fn", value_enum)]
    pub function: Function,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub tau: kzb_core::C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub xi: Option<kzb_core::C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<kzb_core::C64>,
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    ScalarIdentities,
    Quasiperiodicity,
    Flatness,
    Sl2,
    MaurerCartan,
    #[value(name = "prop523")]
    CoframeIdentities,
    Rationality,
    All,
}

impl Suite {
    pub fn names(self) -> Vec<&'static str> {
        match self {
            Suite::All => suites::SUITES.to_vec(),
            s => vec![suites::SUITES[s as usize]],
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Also write the JSON report to this file.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Negative control: flip the sign of the t -> A derivation term.
    #[arg(long, hide = true)]
    pub inject_sign_flip: bool,
}

#[derive(Debug, Args)]
pub struct TransportArgs {
    #[arg(long, value_name = "FILE")]
    pub path: PathBuf,
    /// Initial number of Gauss-Legendre nodes per piece.
    #[arg(long)]
    pub quad: Option<usize>,
    /// Print the largest coefficients instead of the series JSON.
    #[arg(long)]
    pub summary: bool,
    /// Also write the result JSON to this file.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RatcheckArgs {
    #[arg(long, value_name = "FILE")]
    pub frame: PathBuf,
}
