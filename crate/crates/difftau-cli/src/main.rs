//! `difftau`: gap probabilities, the Hahn–dPVI pipeline, Painlevé orbits,
//! Hirota checks, continuum-limit sweeps and the property suite.
//!
//! Exit codes: 0 when every check passes, 1 on a mismatch, 2 on invalid input.

mod commands;
mod config;
mod error;
mod lift;
mod suite;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use difftau::ensembles::DEFAULT_CAP;
use difftau::field::{Scalar, Q};

use crate::config::Document;
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "difftau", version, about = "Tau functions of rational difference connections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON input document for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Field used for arithmetic; overrides a "mode" key in the config.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Comparison tolerance in float mode (ignored in exact mode).
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for randomly generated instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest number of terms a brute-force configuration sum may use.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u128,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Hahn ensemble against dPVI: gap probabilities, coordinates, τ ratios.
    Hahn,
    /// Gap probabilities of an ensemble, determinant against brute force.
    Gap,
    /// Iterate dPV and compare the two τ expressions at each step.
    DpvOrbit,
    /// Iterate dPVI and compare the two τ expressions at each step.
    DpviOrbit,
    /// Hirota determinant identities on a rank-two zero connection.
    Hirota,
    /// Continuum-limit sweep of the second τ ratio.
    Limit,
    /// Run every property suite and print a JSON summary.
    Suite,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

/// Settings shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub tol: f64,
    pub seed: u64,
    pub cap: u128,
}

/// What a subcommand produced: a table or a JSON document, and whether every
/// check passed.
pub struct Report {
    pub body: Body,
    pub ok: bool,
}

pub enum Body {
    Table(Vec<Vec<String>>),
    Json(serde_json::Value),
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let doc = match &cli.config {
        Some(path) => Some(Document::load(path)?),
        None => None,
    };
    let mode = match (cli.mode, doc.as_ref().and_then(Document::mode).transpose()?) {
        (Some(m), _) | (None, Some(m)) => m,
        (None, None) => Mode::Exact,
    };
    if !(cli.tol >= 0.0) {
        return Err(CliError::Invalid("tolerance must be non-negative".into()));
    }
    let cfg = RunConfig { mode, tol: cli.tol, seed: cli.seed, cap: cli.cap };
    match mode {
        Mode::Exact => dispatch::<Q>(cli.command, &cfg, doc.as_ref()),
        Mode::Float => dispatch::<f64>(cli.command, &cfg, doc.as_ref()),
    }
}

fn dispatch<F: Scalar>(command: Command, cfg: &RunConfig, doc: Option<&Document>) -> Result<Report, CliError> {
    match command {
        Command::Hahn => commands::hahn::<F>(cfg, config::required(doc)?),
        Command::Gap => commands::gap::<F>(cfg, config::required(doc)?),
        Command::DpvOrbit => commands::dpv_orbit::<F>(cfg, doc),
        Command::DpviOrbit => commands::dpvi_orbit::<F>(cfg, doc),
        Command::Hirota => commands::hirota::<F>(cfg, doc),
        Command::Limit => commands::limit(cfg, doc),
        Command::Suite => Ok(suite::run_suite::<F>(cfg)),
    }
}

fn emit(body: &Body, out: Option<&PathBuf>) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(File::create(path).map_err(|e| CliError::io(path, e))?),
        None => Box::new(io::stdout().lock()),
    };
    match body {
        Body::Table(rows) => {
            let mut w = csv::Writer::from_writer(sink);
            for row in rows {
                w.write_record(row)?;
            }
            w.flush().map_err(|e| CliError::io(out.map_or("stdout".as_ref(), |p| p.as_path()), e))?;
        }
        Body::Json(value) => {
            let mut sink = sink;
            serde_json::to_writer_pretty(&mut sink, value)?;
            writeln!(sink).map_err(|e| CliError::io(out.map_or("stdout".as_ref(), |p| p.as_path()), e))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|report| emit(&report.body, cli.out.as_ref()).map(|_| report.ok)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("difftau: {e}");
            ExitCode::from(2)
        }
    }
}
