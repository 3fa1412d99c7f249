//! `ckm`: compile reaction networks, intervene on models, simulate
//! multi-environment experiments and rank candidate parent sets.
//!
//! Exit status: 0 success, 1 runtime/numerical failure, 2 usage/input error.

mod commands;
mod config;
mod plot;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed input.
    Usage(String),
    /// Numerical failure or an output that could not be written.
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<ckm_core::Error> for CliError {
    fn from(e: ckm_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Runtime(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ckm", version, about = "Causal kinetic models: compile, intervene, simulate, discover")]
pub struct Cli {
    /// Seed for every stochastic step (overrides the config's `[run] seed`)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Run configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for default output paths
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compile a reaction network to a mass-action model; prints the ODEs and the causal graph
    Compile {
        network: PathBuf,
        /// Model output (default: <out-dir>/<stem>.model)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the experiment described by --config; writes the dataset CSV and plot data
    Simulate,
    /// Apply intervention directives, in order, to a model file
    Intervene {
        model: PathBuf,
        /// e.g. `set-rate k1 0.05`, `clamp C 0.3`, `traj C "sin(1*t+0)"`
        #[arg(required = true)]
        directives: Vec<String>,
        /// Model output (default: <out-dir>/<stem>.intervened.model)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rank candidate parent sets of a target by invariance across environments
    Discover {
        /// Dataset CSV (default: the config's [discover] data, else the simulate output)
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        target: Option<String>,
        /// Largest parent set size (default: number of species)
        #[arg(long)]
        p_max: Option<usize>,
        /// Basis degree, 1 or 2 (default 2)
        #[arg(long)]
        degree: Option<u32>,
        /// Ranking output (default: <out-dir>/ranking.tsv)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
