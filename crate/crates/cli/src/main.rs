//! `mvop`: batch front end over `mvop-core`.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mvop_core::{Error, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Auto,
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Gram matrices, form generators and nonzero spectra per degree
    Omega,
    /// Rank sequence and deficiency
    Rank,
    /// Null-ideal generators and kernel dimensions
    Null,
    /// Moments against vacuum expectations
    Moments,
    /// Structural checks on measure-born or supplied Fock data
    Capcheck,
    /// Marginal Jacobi data and form generators
    Marginal,
    /// Validate Fock input and reconstruct a finitely supported measure
    Favard,
    /// Write the Fock data of a measure in the Fock-input format
    ExportFock,
}

#[derive(Debug, Parser)]
#[command(name = "mvop", version, about = "Interacting Fock space analysis of moment functionals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Measure spec (JSON)
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,

    /// Fock input (JSON)
    #[arg(long, global = true)]
    pub fock: Option<PathBuf>,

    #[arg(long, global = true, env = "MVOP_DEFAULT_DEPTH", default_value_t = 6)]
    pub max_degree: usize,

    #[arg(long, global = true, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,

    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_rank: f64,

    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_null: f64,

    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_comm: f64,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Marginal coordinates, 1-based
    #[arg(long, global = true, value_delimiter = ',')]
    pub coords: Vec<usize>,

    /// Componentwise bound on moment exponents, e.g. `2,2`
    #[arg(long, global = true, value_delimiter = ',')]
    pub up_to: Vec<u32>,
}

/// Failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn malformed(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotPositiveSemidefinite { .. } => 2,
            Error::CommutationViolated { .. } | Error::Consistency(_) | Error::NotFinitelySupported { .. } => 3,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl Cli {
    pub fn tolerances(&self) -> Result<Tolerances, Failure> {
        for (name, v) in [("tol-rank", self.tol_rank), ("tol-null", self.tol_null), ("tol-comm", self.tol_comm)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::malformed(format!("--{name} must be positive")));
            }
        }
        if self.max_degree == 0 {
            return Err(Failure::malformed("--max-degree must be at least 1"));
        }
        Ok(Tolerances {
            rank: self.tol_rank,
            null: self.tol_null,
            comm: self.tol_comm,
            adj: self.tol_comm,
            ..Tolerances::default()
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(outcome) => {
            print!("{}", output::render(&outcome.report, cli.format));
            match outcome.failure {
                Some(f) => {
                    eprintln!("mvop: {}", f.message);
                    ExitCode::from(f.code)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(f) => {
            eprintln!("mvop: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
