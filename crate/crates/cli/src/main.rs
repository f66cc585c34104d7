//! `coolbound` — cooling-bound tables, cycle simulations, rate tables and
//! randomized verification campaigns, as CSV.
//!
//! Exit codes: 0 success, 1 bound violation (strict mode) or campaign
//! violations, 2 configuration or usage error.

mod commands;
mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ConfigFile;

#[derive(Debug)]
pub enum CliError {
    /// Configuration or usage problem; exit code 2.
    Config(String),
    /// A strict-mode bound violation; exit code 1.
    Violation(String),
}

impl CliError {
    fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

#[derive(Parser)]
#[command(
    name = "coolbound",
    version,
    about = "Cooling bounds and cycle protocols for finite quantum thermal machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to a key = value run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StrictArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Keep going when a cycle escapes the universal bound.
    #[arg(long)]
    no_strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form bound quantities for a target/machine pairing.
    Bound(CommonArgs),
    /// Run a cooling protocol to its fixed point, one CSV row per cycle.
    Simulate(StrictArgs),
    /// Convergence-rate table for machines of n identical qubits.
    Rate(CommonArgs),
    /// Randomized verification campaign against the universal bound.
    Oracle(CommonArgs),
    /// Repeat simulate over a list of values of one parameter.
    Sweep(StrictArgs),
}

fn load(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    ConfigFile::parse(&text)
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn strict_check(output: &commands::SimulateOutput, no_strict: bool) -> Result<(), CliError> {
    match output.first_violation {
        Some(cycle) if !no_strict => Err(CliError::Violation(format!(
            "cycle {cycle} escaped the universal bound (rerun with --no-strict to keep the data)"
        ))),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bound(args) => {
            let cfg = load(&args.config)?;
            emit(&args.out, &commands::cmd_bound(&cfg)?)
        }
        Command::Simulate(args) => {
            let cfg = load(&args.common.config)?;
            let output = commands::cmd_simulate(&cfg)?;
            emit(&args.common.out, &output.csv)?;
            strict_check(&output, args.no_strict)
        }
        Command::Rate(args) => {
            let cfg = load(&args.config)?;
            emit(&args.out, &commands::cmd_rate(&cfg)?)
        }
        Command::Oracle(args) => {
            let cfg = load(&args.config)?;
            let (report, violations) = commands::cmd_oracle(&cfg)?;
            emit(&args.out, &report)?;
            if violations > 0 {
                return Err(CliError::Violation(format!(
                    "{violations} campaign runs violated the universal bound"
                )));
            }
            Ok(())
        }
        Command::Sweep(args) => {
            let cfg = load(&args.common.config)?;
            let out = args.common.out.as_ref().ok_or_else(|| {
                CliError::config("sweep requires --out; each run writes its own file")
            })?;
            let stem = out.with_extension("");
            let ext = out
                .extension()
                .map(|e| format!(".{}", e.to_string_lossy()))
                .unwrap_or_default();
            let runs = commands::cmd_sweep(&cfg, &stem.to_string_lossy(), &ext)?;
            let mut violation = None;
            for run in &runs {
                let path = PathBuf::from(&run.file_name);
                fs::write(&path, &run.output.csv)
                    .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
                println!("wrote {}", path.display());
                if violation.is_none() {
                    if let Some(cycle) = run.output.first_violation {
                        violation = Some((run.file_name.clone(), cycle));
                    }
                }
            }
            match violation {
                Some((file, cycle)) if !args.no_strict => Err(CliError::Violation(format!(
                    "{file}: cycle {cycle} escaped the universal bound"
                ))),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Violation(msg)) => {
            eprintln!("coolbound: bound violation: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("coolbound: config error: {msg}");
            ExitCode::from(2)
        }
    }
}
