//! `monopole` command-line front end.
//!
//! `monopole run <config.json>` executes one study described by a JSON
//! config (`-` reads the config from stdin) and prints a JSON report to
//! stdout; data files land next to the working directory or under
//! `--out-dir`. `monopole suite <dir>` writes the ready-to-run reproduction
//! configs. Exit codes: 0 success, 2 config parse/validation error, 3
//! numerical failure. Logs go to stderr.

mod config;
mod studies;
mod suite;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::StudyConfig;
use studies::{run_study, RunError};

#[derive(Parser)]
#[command(name = "monopole", version, about = "Berry-curvature monopoles, branch cuts and Chern fluxes of a two-mode non-Hermitian Dirac model")]
struct Cli {
    /// Worker threads for field evaluation (0 = automatic). Falls back to
    /// the MC_THREADS environment variable.
    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Directory for emitted data files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,

    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single study from a JSON config file (`-` for stdin).
    Run { config: PathBuf },
    /// Write the reproduction suite of config files into a directory.
    Suite { dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let threads = if cli.threads > 0 {
        cli.threads
    } else {
        std::env::var("MC_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .unwrap_or(0)
    };
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("warning: could not configure {threads} threads: {e}");
        }
    }

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(RunError::Numerical(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), RunError> {
    match &cli.command {
        Command::Run { config } => {
            let (text, base_dir) = if config.as_os_str() == "-" {
                let mut buf = String::new();
                std::io::stdin()
                    .read_to_string(&mut buf)
                    .map_err(|e| RunError::Config(format!("cannot read stdin: {e}")))?;
                (buf, PathBuf::from("."))
            } else {
                let text = std::fs::read_to_string(config).map_err(|e| {
                    RunError::Config(format!("cannot read config {}: {e}", config.display()))
                })?;
                let base = config.parent().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
                (text, base)
            };
            let parsed = StudyConfig::from_json(&text)?;
            let report = run_study(&parsed, &base_dir, &cli.out_dir, cli.verbose)?;
            let mut out = serde_json::to_string_pretty(&report).expect("report serialization");
            out.push('\n');
            print!("{out}");
            Ok(())
        }
        Command::Suite { dir } => {
            let written = suite::emit_reproduction_suite(dir)?;
            let mut out = serde_json::to_string_pretty(&serde_json::json!({
                "suite_dir": dir.to_string_lossy(),
                "configs": written,
            }))
            .expect("suite listing serialization");
            out.push('\n');
            print!("{out}");
            Ok(())
        }
    }
}
