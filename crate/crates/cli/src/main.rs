use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

mod commands;
mod quat_ops;
mod verify;

/// Exit status for a non-discreteness certificate.
pub const EXIT_CERTIFICATE: u8 = 10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn failure(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

/// Trace polynomials of good words and discreteness tests for two-generator groups.
#[derive(Debug, Parser)]
#[command(name = "tracepoly", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Word polynomials r, s, t, w, g and the trace polynomial p of a word.
    Poly(commands::PolyArgs),
    /// Randomized property sweeps against matrix evaluation.
    Verify(verify::VerifyArgs),
    /// Roots of p_w(beta, .) over a word corpus, optionally with a grid classification.
    Scan(commands::ScanArgs),
    /// Search for a non-discreteness certificate at (beta, gamma).
    Discrete(commands::DiscreteArgs),
    /// Brute-force enumeration of low-degree units.
    Units(commands::UnitsArgs),
    /// Arithmeticity screen for an algebraic parameter.
    Arith(commands::ArithArgs),
    /// Raw quaternion operations.
    Quat(quat_ops::QuatArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracepoly::configure_threads();
    let res = match cli.command {
        Command::Poly(a) => commands::poly(a),
        Command::Verify(a) => verify::run(a),
        Command::Scan(a) => commands::scan(a),
        Command::Discrete(a) => commands::discrete(a),
        Command::Units(a) => commands::units(a),
        Command::Arith(a) => commands::arith(a),
        Command::Quat(a) => quat_ops::run(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
