use std::path::PathBuf;
use std::process::ExitCode;

use anisospec_cli::{run, Command, ExitStatus, ExperimentConfig, Overrides};
use clap::Parser;

/// Spectral experiments for anisotropic Lorentzian kernels.
#[derive(Parser)]
#[command(name = "anisospec", version)]
struct Args {
    command: Command,
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated β values replacing `numeric.betas`.
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    #[arg(long)]
    n: Option<usize>,
    /// Fixed cutoff `L`.
    #[arg(long = "L")]
    cutoff_l: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut config = match ExperimentConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("anisospec: {e}");
            return ExitCode::from(e.status() as u8);
        }
    };
    config.apply(&Overrides {
        command: Some(args.command),
        betas: args.beta,
        n: args.n,
        cutoff_l: args.cutoff_l,
        out: args.out,
    });
    match run(&config) {
        Ok(status) => {
            if status != ExitStatus::Passed {
                eprintln!(
                    "anisospec: {} finished with status {}",
                    config.command.name(),
                    status as u8
                );
            }
            ExitCode::from(status as u8)
        }
        Err(e) => {
            eprintln!("anisospec: {e}");
            ExitCode::from(e.status() as u8)
        }
    }
}
