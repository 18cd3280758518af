use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use locc_core::discrimination::DEFAULT_SEED;

#[derive(Parser, Debug)]
#[command(name = "locc", version, about = "One-way LOCC distinguishability of maximally entangled state sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit a named state family as JSON.
    Construct {
        family: Family,
        #[command(flatten)]
        params: FamilyParams,
        #[command(flatten)]
        common: Common,
    },
    /// Decide distinguishability and print a verdict with its certificate.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Block structure of the algebra generated by the operator system.
    Decompose {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Outcome table of a fixed local product measurement.
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        /// `y-basis`, `z-basis`, or a path to a measurement JSON file
        #[arg(long, default_value = "y-basis")]
        measure: String,
        /// Remove one state first, by index or by label
        #[arg(long)]
        drop: Option<String>,
        /// Also draw this many samples per state
        #[arg(long)]
        shots: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Recheck the certificate in a saved verdict.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Example2,
    Theorem2,
    Theorem4,
    Halfshift,
}

#[derive(Args, Debug, Clone, Default)]
pub struct FamilyParams {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// StateSet JSON file
    #[arg(long, conflicts_with_all = ["construct", "states"])]
    pub input: Option<PathBuf>,
    #[arg(long, conflicts_with = "states")]
    pub construct: Option<Family>,
    /// Comma-separated Pauli words, e.g. "I,X" or "x1z0@d3,x0z1@d3"
    #[arg(long)]
    pub states: Option<String>,
    #[command(flatten)]
    pub params: FamilyParams,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Integer seed, or `random`
    #[arg(long, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Membership tolerance override
    #[arg(long, value_parser = parse_tol)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub verbose: bool,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    if s == "random" {
        return Ok(rand::random());
    }
    s.parse().map_err(|_| format!("expected an integer or `random`, got {s:?}"))
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("tolerance must be a positive number, got {s:?}")),
    }
}
