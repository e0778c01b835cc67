use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use symqite_cli::commands::{self, CliError};
use symqite_cli::config::{load_raw, ExperimentConfig};

#[derive(Parser)]
#[command(name = "symqite", version, about = "Symmetry-reduced ansatz and VarQITE experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Config file: dotted `key = value` lines, or JSON.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `evolution.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `outputs.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// List the reduced generator basis of every local term.
    Reduce,
    /// Parameter and naive CNOT counts for tr_only and internal_plus_tr.
    Counts,
    /// Run VarQITE and write trace.csv and manifest.json.
    Evolve,
    /// Write exact Gibbs energies on the evolution's beta grid.
    Oracle,
    /// Run the invariant suite and print a JSON report.
    Validate,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let raw = match &cli.config {
        Some(p) => load_raw(p)?,
        None => BTreeMap::new(),
    };
    Ok(ExperimentConfig::from_raw(&raw, cli.seed, cli.out.as_deref())?)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Reduce => commands::reduce(&load(cli)?, &mut stdout),
        Command::Counts => commands::counts(&load(cli)?, &mut stdout),
        Command::Evolve => commands::evolve_cmd(&load(cli)?, &mut stdout),
        Command::Oracle => commands::oracle(&load(cli)?, &mut stdout),
        Command::Validate => commands::validate(cli.out.as_deref(), &mut stdout),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
