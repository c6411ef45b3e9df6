use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cqed_cli::config::{self, OutputFormat};
use cqed_cli::experiments::{run_baseline, run_chevron, run_readout, run_transmon_spectrum, write_run};
use cqed_cli::CliError;

#[derive(Debug, Parser)]
#[command(name = "cqed", version, about = "Circuit-QED simulations emitting CSV/JSON data")]
struct Cli {
    #[command(subcommand)]
    experiment: Experiment,

    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides output.directory [default: ./out]
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Table format; overrides output.format [default: csv]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for sweeps [default: all cores]
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Experiment {
    /// Coupled, uncoupled and dissipative single-photon exchange
    Baseline,
    /// Vacuum Rabi oscillations across a qubit-cavity detuning sweep
    Chevron,
    /// Dispersive reflection sweep and qubit-conditioned cavity response
    Readout,
    /// Transmon charge-basis spectrum and Jaynes-Cummings ladder
    Spectrum,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let cfg = config::load(&path)?;
    if cli.threads == Some(0) {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    let out = cli.out.unwrap_or_else(|| {
        if cfg.provenance.iter().any(|n| n.starts_with("output.directory")) {
            PathBuf::from("./out")
        } else {
            cfg.output.directory.clone()
        }
    });
    let format = match cli.format {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Json) => OutputFormat::Json,
        None => cfg.output.format,
    };
    for note in &cfg.provenance {
        log::info!("{note}");
    }

    let result = match cli.experiment {
        Experiment::Baseline => run_baseline(&cfg)?,
        Experiment::Chevron => run_chevron(&cfg, cli.threads)?,
        Experiment::Readout => run_readout(&cfg)?,
        Experiment::Spectrum => run_transmon_spectrum(&cfg)?,
    };
    for p in write_run(&result, &out, format)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
