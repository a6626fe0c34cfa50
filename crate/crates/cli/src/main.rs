//! `histories`: evaluate, certify and query sets of quantum histories.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "histories", version, about = "Decoherent-histories engine")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true, env = "HISTORIES_CONFIG")]
    pub config: Option<PathBuf>,
    /// Certification threshold on the largest off-diagonal |D|.
    #[arg(long, global = true, env = "HISTORIES_EPSILON")]
    pub epsilon: Option<f64>,
    /// Refuse grids with more histories than this.
    #[arg(long, global = true, env = "HISTORIES_MAX_HISTORIES")]
    pub max_histories: Option<usize>,
    /// Chain evaluation mode.
    #[arg(long, global = true, env = "HISTORIES_MODE", value_enum)]
    pub mode: Option<ModeArg>,
    /// Output directory.
    #[arg(long, global = true, env = "HISTORIES_OUT")]
    pub out: Option<PathBuf>,
    /// Seed for the random model.
    #[arg(long, global = true, env = "HISTORIES_SEED")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Heisenberg,
    Schrodinger,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Branch vectors, decoherence matrix and (if certified) probabilities.
    Simulate,
    /// Decoherence matrix and certification verdict only.
    CheckDecoherence,
    /// Conditional probability of a later alternative.
    Predict,
    /// Conditional probability of earlier alternatives given a present one.
    Retrodict,
    /// Rank coarse-grainings of the grid.
    ScanRealms,
    /// Built-in models.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModelsAction {
    /// Names, dimensions and suggested grids of the built-in models.
    List,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    histories::linalg::with_sequential_kernels(|| commands::run(&cli))
}
