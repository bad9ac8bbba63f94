//! `bsm`: command-line front end for the Bell-state measurement simulator.
//!
//! Four subcommands: `distribution` (detection-pattern probabilities, with
//! optional Monte Carlo sampling through the detector model), `metrics`
//! (classification quality over all four input states), `classify-table`
//! (the pattern -> label table itself), and `relay` (repeater-chain success
//! curves). All artifacts are deterministic: rerunning a command with the
//! same arguments produces byte-identical output.

mod artifact;
mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{resolve, CommonArgs, FileConfig, Format, FormatArg};

/// Exit code 2 for bad invocations or config files, 3 for runtime failures.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(anyhow::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Runtime(err) => write!(f, "{err:#}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "bsm", version, about = "Linear-optical Bell-state measurement toolkit")]
struct Cli {
    /// JSON config file; command-line flags override its fields.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detection-pattern distribution for one input state (or all four).
    Distribution(CommonArgs),
    /// Identification metrics for all four input states.
    Metrics(CommonArgs),
    /// Pattern-to-state classification table.
    ClassifyTable(CommonArgs),
    /// Relay-chain success probability versus segment count.
    Relay(RelayArgs),
}

#[derive(Args)]
pub struct RelayArgs {
    /// Extra curve with this per-station success probability (repeatable).
    #[arg(long = "p-c", value_name = "PROB")]
    pub p_c: Vec<f64>,

    /// Largest segment count to tabulate.
    #[arg(long, default_value_t = 20, value_name = "N")]
    pub n_max: u32,

    /// Scale with the memory-assisted exponent instead of the memoryless one.
    #[arg(long)]
    pub memory: bool,

    /// Output path (stdout when omitted; csv writes one file per curve).
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Artifact format.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Distribution(args) => commands::distribution(&resolve(&file, &args)?),
        Command::Metrics(args) => commands::metrics(&resolve(&file, &args)?),
        Command::ClassifyTable(args) => commands::classify_table(&resolve(&file, &args)?),
        Command::Relay(args) => {
            let output = args.output.clone().or_else(|| file.output.clone());
            let format = match args.format {
                Some(FormatArg::Json) => Format::Json,
                Some(FormatArg::Csv) => Format::Csv,
                None => match &file.format {
                    Some(s) => config::parse_format(s)?,
                    None => Format::Json,
                },
            };
            commands::relay(&args, output.as_deref(), format)
        }
    }
}
