use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{debug, info};
use offload_core::{run, EngineError, Scenario};
use offload_sim::{emit_metrics, parse_scenario, sweep, Format, SweepError};

/// Cooperative offloading simulator.
///
/// Exit codes: 0 success, 1 invalid input, 2 runtime failure.
/// Log verbosity is read from OFFLOAD_LOG (e.g. OFFLOAD_LOG=debug).
#[derive(Parser)]
#[command(name = "offload-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a scenario file.
    Validate { file: PathBuf },
    /// Simulate a scenario and write per-round metrics.
    Run {
        file: PathBuf,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a scenario once per seed and aggregate the summaries.
    Sweep {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Jsonl,
}

enum Failure {
    Invalid(String),
    Runtime(String),
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::InvalidScenario(_) => Failure::Invalid(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { file } => {
            let s = load(&file)?;
            println!(
                "ok: {} devices, {} links, {} rounds",
                s.graph.vertex_count(),
                s.graph.link_count(),
                s.rounds
            );
        }
        Command::Run {
            file,
            seed,
            format,
            out,
        } => {
            let mut s = load(&file)?;
            if let Some(seed) = seed {
                s.seed = seed;
            }
            info!("running {} rounds with seed {}", s.rounds, s.seed);
            let trace = run(&s)?;
            let format = match format {
                OutputFormat::Csv => Format::Csv,
                OutputFormat::Jsonl => Format::JsonLines,
            };
            write_out(out.as_deref(), &emit_metrics(&trace, format))?;
        }
        Command::Sweep { file, seeds, out } => {
            let s = load(&file)?;
            debug!("sweeping seeds {seeds:?}");
            let report = sweep(&s, &seeds).map_err(|e| match e {
                SweepError::Run { source, .. } => Failure::from(source),
                other => Failure::Invalid(other.to_string()),
            })?;
            write_out(out.as_deref(), &report.to_csv())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("OFFLOAD_LOG", "warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
