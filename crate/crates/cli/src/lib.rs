//! Batch front-end: configuration parsing, run orchestration, and CSV/JSON
//! output for the exciton-network simulator in `qdq-core`.

pub mod config;
pub mod output;
pub mod run;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Simulator for phonon-damped dynamics of dipole-coupled quantum-dot
/// exciton qubits.
#[derive(Debug, Parser)]
#[command(name = "qdq", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate a single trajectory and write it as CSV plus a JSON summary.
    Simulate(RunArgs),
    /// Sweep the bath temperature and write the fitted rate table.
    Sweep(RunArgs),
    /// Run the oracle-equivalence and closed-system verification suites.
    OracleCheck(RunArgs),
}

/// Flags shared by all subcommands; flags win over config-file values.
#[derive(Debug, clap::Args, Clone)]
pub struct RunArgs {
    /// Path to a TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Bath temperature in K.
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Time step in ps.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Memory length in steps.
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Output directory (default: $QDQ_OUT_DIR or the config value).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweep points (default 1 for bit-reproducibility).
    #[arg(long)]
    pub threads: Option<usize>,
}

pub fn cli_main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Simulate(a) => (config::Mode::Simulate, a),
        Command::Sweep(a) => (config::Mode::Sweep, a),
        Command::OracleCheck(a) => (config::Mode::OracleCheck, a),
    };
    match run::run_command(mode, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Machine-readable error record on stderr.
            let record = serde_json::json!({ "error": e.to_string() });
            eprintln!("{record}");
            ExitCode::FAILURE
        }
    }
}
