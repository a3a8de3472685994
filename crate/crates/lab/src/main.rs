use std::path::PathBuf;
use std::process::ExitCode;

use beltrami_lab::{Experiment, ExperimentConfig, LabError};
use clap::Parser;

/// Desk-scale experiments on localized Beltrami data.
///
/// Exit code 0 = PASS, 1 = FAIL, 2 = INCONCLUSIVE, 3 = configuration error.
#[derive(Debug, Parser)]
#[command(name = "beltrami-lab", version)]
struct Cli {
    command: Experiment,
    /// TOML file layered over the embedded defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, LabError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(cli.command, p)?,
        None => ExperimentConfig::defaults(cli.command),
    };
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match resolve(&cli) {
        Err(e) => {
            eprintln!("beltrami-lab: {e}");
            e.exit_code()
        }
        Ok(cfg) if cli.print_config => {
            print!("{}", cfg.to_toml());
            0
        }
        Ok(cfg) => match beltrami_lab::run(&cfg) {
            Ok(report) => {
                print!("{}", report.summary());
                report.verdict.exit_code()
            }
            Err(e) => {
                eprintln!("beltrami-lab: {e}");
                e.exit_code()
            }
        },
    };
    ExitCode::from(code as u8)
}
