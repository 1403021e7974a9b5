use capa_cli::config::ExperimentConfig;
use capa_cli::error::CmdError;
use capa_cli::{cmd_gain, cmd_region, cmd_sweep_aperture, cmd_sweep_occupancy, cmd_verify};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Uplink analysis for continuous-aperture receive arrays: channel-gain
/// cross-checks, rate/capacity sweeps, capacity regions, and numerical
/// verification of the closed forms.
#[derive(Parser, Debug)]
#[command(name = "capa", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file (see docs/FORMATS.md); verify runs with built-in
    /// defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path; overrides [output].path (stdout when neither is set).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override [oracle].seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override [oracle].grid (cells per axis).
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Override [oracle].trials.
    #[arg(long, global = true)]
    trials: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quadrature-vs-closed-form channel gains over a geometry sweep.
    Gain,
    /// Rates and sum-rate capacity over a square-aperture size sweep.
    SweepAperture,
    /// Rates and sum-rate capacity of an element grid over its occupation ratio.
    SweepOccupancy,
    /// Capacity-region boundary (box, corners, time-sharing segment).
    Region,
    /// Run the numerical verification suites.
    Verify,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CmdError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CmdError::usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            capa_cli::parse_config(&text)?
        }
        None => match cli.command {
            Command::Verify => ExperimentConfig::reference_defaults(),
            _ => return Err(CmdError::usage("--config is required for this command")),
        },
    };
    if let Some(seed) = cli.seed {
        cfg.oracle.seed = seed;
    }
    if let Some(grid) = cli.grid {
        cfg.oracle.grid = grid;
    }
    if let Some(trials) = cli.trials {
        cfg.oracle.trials = trials;
    }
    Ok(cfg)
}

fn emit(cli: &Cli, cfg: &ExperimentConfig, text: &str) -> Result<(), CmdError> {
    let target = cli.out.clone().or_else(|| cfg.output.clone());
    match target {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| CmdError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CmdError> {
    let cfg = load_config(cli)?;
    match cli.command {
        Command::Gain => emit(cli, &cfg, &cmd_gain(&cfg)?),
        Command::SweepAperture => emit(cli, &cfg, &cmd_sweep_aperture(&cfg)?),
        Command::SweepOccupancy => emit(cli, &cfg, &cmd_sweep_occupancy(&cfg)?),
        Command::Region => emit(cli, &cfg, &cmd_region(&cfg)?),
        Command::Verify => {
            let outcome = cmd_verify(&cfg)?;
            emit(cli, &cfg, &outcome.report)?;
            if outcome.passed {
                Ok(())
            } else {
                Err(CmdError::Verification(
                    "verification suites reported failures".into(),
                ))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
