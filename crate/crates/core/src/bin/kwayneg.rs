use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kway_negativity::cli;
use kway_negativity::ghzw::Sign;
use kway_negativity::io;
use kway_negativity::roof::RoofMeasure;
use kway_negativity::{Error, Result};

/// Negativities, tangles and canonical forms of multi-qubit states.
#[derive(Parser)]
#[command(name = "kwayneg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Negativity report, tangles and Δ for one focus.
    Analyze {
        file: String,
        #[arg(long, default_value = "A")]
        focus: String,
        #[arg(long)]
        canonical: bool,
    },
    /// Canonical forms of a three-qubit pure state.
    Canonicalize { file: String },
    /// CSV sweep over the GHZ+W family.
    Sweep {
        #[arg(long, default_value = "ghzw")]
        family: String,
        #[arg(long)]
        sign: Sign,
        /// start:end:steps
        #[arg(long, default_value = "0:1:101")]
        q: String,
    },
    /// Convex-roof upper bound for a mixed state.
    Roof {
        file: String,
        #[arg(long, default_value = "A")]
        focus: String,
        #[arg(long, default_value = "global")]
        measure: RoofMeasure,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo inequality audit over Haar-random pure states.
    Audit {
        #[arg(long)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        qubits: usize,
    },
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Argument(format!("{path}: {e}")))
}

fn run(cmd: Command) -> Result<String> {
    match cmd {
        Command::Analyze {
            file,
            focus,
            canonical,
        } => io::emit_json(&cli::analyze(
            &read(&file)?,
            Some(cli::parse_focus(&focus)?),
            canonical,
        )?),
        Command::Canonicalize { file } => io::emit_json(&cli::canonicalize(&read(&file)?)?),
        Command::Sweep { family, sign, q } => cli::sweep(&family, sign, &q),
        Command::Roof {
            file,
            focus,
            measure,
            restarts,
            seed,
        } => io::emit_json(&cli::roof(
            &read(&file)?,
            cli::parse_focus(&focus)?,
            measure,
            restarts,
            seed,
        )?),
        Command::Audit {
            random,
            seed,
            qubits,
        } => cli::audit(random, seed, qubits),
    }
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(args.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("kwayneg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
