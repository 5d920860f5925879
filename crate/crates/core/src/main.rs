use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use log::{error, info};

use discojam::experiment::{
    run_experiment, validate_and_load, write_outputs, ExperimentFile, ExperimentId, ExperimentSpec, Overrides,
};

#[derive(Parser)]
#[command(name = "discojam", version, about = "DIRS-jammed uplink MU-MISO Monte Carlo experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one sweep and write `<experiment>.csv` plus `manifest.json`.
    Run {
        /// JSON experiment file; built-in defaults are used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        experiment: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Print the resolved experiment (defaults plus file and overrides) as JSON.
    Show {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        experiment: Option<String>,
    },
}

fn load(config: Option<PathBuf>, overrides: &Overrides) -> anyhow::Result<ExperimentSpec> {
    Ok(match config {
        Some(path) => validate_and_load(&path, overrides).with_context(|| format!("loading {}", path.display()))?,
        None => ExperimentSpec::resolve(ExperimentFile::default(), overrides)?,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            error!("{e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            experiment,
            trials,
            seed,
            out,
        } => {
            let overrides = Overrides {
                experiment: experiment.map(|e| e.parse::<ExperimentId>()).transpose()?,
                trials,
                seed,
            };
            let spec = load(config, &overrides)?;
            info!(
                "{}: {} grid points x {} scenarios, {} trials, seed {}",
                spec.experiment,
                spec.grid.len(),
                spec.scenarios.len(),
                spec.scene.trials,
                spec.scene.seed
            );
            let started = std::time::Instant::now();
            let output = run_experiment(&spec)?;
            write_outputs(&out, &spec, &output)?;
            info!(
                "wrote {} rows to {} in {:.1?}",
                output.rows.len(),
                out.display(),
                started.elapsed()
            );
            if output.ok() {
                Ok(ExitCode::SUCCESS)
            } else {
                for f in &output.failures {
                    error!("grid point {}: {}", f.sweep_value, f.message);
                }
                Ok(ExitCode::from(1))
            }
        }
        Command::Show { config, experiment } => {
            let overrides = Overrides {
                experiment: experiment.map(|e| e.parse::<ExperimentId>()).transpose()?,
                ..Overrides::default()
            };
            let spec = load(config, &overrides)?;
            println!("{}", serde_json::to_string_pretty(&spec)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}
