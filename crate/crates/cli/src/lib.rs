//! Command-line front end: computes and caches count tables, checks bounds,
//! analyses the singular point and verifies asymptotics.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 computation or I/O error.

pub mod cache;
pub mod commands;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::cache::Format;
use crate::report::ReportDocument;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gwasym", version, about = "Exact curve counts and the asymptotics of their generating series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    P2,
    P3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Exact counts against the asymptotic expansion.
    Asymptotics,
    /// Threshold after which d-th roots increase.
    Monotone,
    /// d-th roots along rays of the P3 grid.
    Rays,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Asymptotics => "asymptotics",
            Suite::Monotone => "monotone",
            Suite::Rays => "rays",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a table and write it to a cache file.
    Compute {
        target: TargetArg,
        #[arg(long, default_value_t = 0)]
        genus: u32,
        #[arg(long)]
        dmax: usize,
        /// Defaults to $GWASYM_CACHE_DIR (or ./.gwasym)/<target>-g<genus>-d<dmax>.<ext>.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Cache)]
        format: Format,
    },
    /// Check every applicable bound on a cached table.
    Bounds { cache: PathBuf },
    /// Locate the singular point and expand the series around it.
    Singularity {
        /// Genus-0 P2 cache.
        cache: PathBuf,
        /// Working precision in bits.
        #[arg(long, default_value_t = 256)]
        prec: u32,
        /// Number M of expansion coefficients a_0..a_M.
        #[arg(long, default_value_t = 20)]
        coeffs: usize,
        /// Number of series terms summed; defaults to the whole table.
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Run a verification suite on one or more caches.
    Verify {
        caches: Vec<PathBuf>,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 256)]
        prec: u32,
        /// Ray alpha,beta for the rays suite; repeatable.
        #[arg(long = "ray", value_parser = parse_ray)]
        rays: Vec<(usize, usize)>,
        /// Model a,k,n1 for the monotone suite (rationals allowed, e.g. 1/2,3,1); repeatable.
        #[arg(long = "model")]
        models: Vec<String>,
        /// Degrees computed for --model sequences.
        #[arg(long, default_value_t = 200)]
        dmax: usize,
    },
}

fn parse_ray(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected alpha,beta, got `{s}`"))?;
    let a = a.trim().parse().map_err(|_| format!("bad alpha `{a}`"))?;
    let b = b.trim().parse().map_err(|_| format!("bad beta `{b}`"))?;
    Ok((a, b))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Computation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Computation(_) => EXIT_COMPUTATION,
        }
    }
}

impl From<cache::CacheError> for CliError {
    fn from(e: cache::CacheError) -> Self {
        CliError::Computation(e.to_string())
    }
}

/// A finished command: its report and whether every check passed.
#[derive(Debug)]
pub struct Outcome {
    pub report: ReportDocument,
    pub passed: bool,
    /// Human-readable lines for standard error (violations, verdicts).
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_VERIFICATION
        }
    }
}

/// Runs one parsed command. `argv` is echoed into the report.
pub fn run(cli: Cli, argv: Vec<String>) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Compute { target, genus, dmax, out, format } => {
            commands::compute(argv, target, genus, dmax, out, format)
        }
        Command::Bounds { cache } => commands::bounds(argv, &cache),
        Command::Singularity { cache, prec, coeffs, terms } => commands::singularity(argv, &cache, prec, coeffs, terms),
        Command::Verify { caches, suite, prec, rays, models, dmax } => {
            commands::verify(argv, &caches, suite, prec, &rays, &models, dmax)
        }
    }
}
