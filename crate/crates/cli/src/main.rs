//! `evolve`: run, check and inspect migrations against a JSON-lines
//! entity store.

mod commands;
mod lock;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Schema evolution for a versioned entity store.
#[derive(Debug, Parser)]
#[command(name = "evolve", version, about)]
pub struct Cli {
    /// Store file, one JSON entity per line.
    #[arg(long, global = true, value_name = "PATH")]
    store: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,

    /// Execute even when the safety check reports conflicts.
    #[arg(long, global = true, conflicts_with = "dry_run")]
    force: bool,

    /// Compute and report, but leave the store file untouched.
    #[arg(long, global = true)]
    dry_run: bool,

    /// Lazy migration rule file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    rules: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check and execute a statement, rewriting the store.
    Exec {
        /// Statement text, or `-` to read it from stdin.
        statement: String,
    },
    /// Run the safety check only.
    Check { statement: String },
    /// Print entities of a kind, optionally filtered by `name=value`.
    Get { kind: String, filters: Vec<String> },
    /// Apply the lazy rules twice to every entity and report differences.
    CheckLazy,
    /// Print a statement in canonical form.
    Fmt { statement: String },
    /// Print the whole store.
    Dump,
}

pub struct Config {
    pub store: Option<PathBuf>,
    pub output: Output,
    pub force: bool,
    pub dry_run: bool,
    pub rules: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = Config {
        store: cli.store,
        output: cli.output,
        force: cli.force,
        dry_run: cli.dry_run,
        rules: cli.rules,
    };
    let result = match &cli.command {
        Command::Exec { statement } => commands::exec(&config, statement),
        Command::Check { statement } => commands::check(&config, statement),
        Command::Get { kind, filters } => commands::get(&config, kind, filters),
        Command::CheckLazy => commands::check_lazy(&config),
        Command::Fmt { statement } => commands::fmt(&config, statement),
        Command::Dump => commands::dump(&config),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.exit_code().into()
        }
    }
}
