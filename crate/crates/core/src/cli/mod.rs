//! The `mgd` command line: argument definitions, exit codes and commands.

mod commands;
pub mod statefile;
pub mod sweep;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::states::StateKind;

pub use commands::{cmd_discord, cmd_gen, cmd_sweep, cmd_validate, run, Output};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_INVALID_STATE: u8 = 3;
pub const EXIT_UNSUPPORTED: u8 = 4;

/// An error carrying the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn parse(message: String) -> Self {
        CliError {
            code: EXIT_PARSE,
            message,
        }
    }

    pub fn io(message: String) -> Self {
        CliError {
            code: EXIT_PARSE,
            message,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidState(_) => EXIT_INVALID_STATE,
            Error::UnsupportedSize { .. } => EXIT_UNSUPPORTED,
            _ => EXIT_PARSE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mgd",
    version,
    about = "Geometric discord of multi-qubit states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discord of a state read from a JSON file.
    Discord(DiscordArgs),
    /// Discord along a one-parameter family, as CSV.
    Sweep(SweepArgs),
    /// Consistency checks on given or random states.
    Validate(ValidateArgs),
    /// Write a generated state as JSON.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Closed,
    Numeric,
    Both,
}

impl From<MethodArg> for sweep::Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Closed => sweep::Method::Closed,
            MethodArg::Numeric => sweep::Method::Numeric,
            MethodArg::Both => sweep::Method::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Ghz,
    W,
    PlusProduct,
    BasisProduct,
    WernerGhz,
    WGhzMix,
    ClassicalMix,
    Family,
    RandomDensity,
    RandomPure,
}

impl From<KindArg> for StateKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Ghz => StateKind::Ghz,
            KindArg::W => StateKind::W,
            KindArg::PlusProduct => StateKind::PlusProduct,
            KindArg::BasisProduct => StateKind::BasisProduct,
            KindArg::WernerGhz => StateKind::WernerGhz,
            KindArg::WGhzMix => StateKind::WGhzMix,
            KindArg::ClassicalMix => StateKind::ClassicalMix,
            KindArg::Family => StateKind::Family,
            KindArg::RandomDensity => StateKind::RandomDensity,
            KindArg::RandomPure => StateKind::RandomPure,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OptimizerArgs {
    /// Numeric restarts.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Seed for the numeric restarts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run everything on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DiscordArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, value_enum, default_value = "closed")]
    pub method: MethodArg,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Measurement order as a permutation of 1..n, e.g. 2,1,3.
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: KindArg,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Correlation direction for `family`, scaled by p.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    pub c: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "closed")]
    pub method: MethodArg,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<usize>>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub state: Option<PathBuf>,
    /// Generate COUNT random states of N qubits starting at SEED.
    #[arg(long, num_args = 3, value_names = ["N", "SEED", "COUNT"])]
    pub random: Option<Vec<u64>>,
    /// Random trees per state.
    #[arg(long, default_value_t = 5)]
    pub trees: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    pub c: Option<Vec<f64>>,
    #[arg(long)]
    pub bits: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub rank: Option<usize>,
    /// Destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
