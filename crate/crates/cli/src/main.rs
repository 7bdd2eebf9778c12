use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use hybrid_nls_cli::commands::{self, exit};
use hybrid_nls_cli::config::{Overrides, RunConfig};

/// Ground states on a line joined to a plane.
///
/// Exit status: 0 converged, 1 error, 2 runaway along the line,
/// 3 iteration cap reached, 4 a verification check failed.
#[derive(Parser)]
#[command(name = "hybrid-nls", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    sigma: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    p: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    r: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    mu: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the energy; writes report.json, profiles.txt and history.txt.
    Solve,
    /// Solve along one parameter axis; writes sweep_<axis>.tsv.
    Sweep,
    /// Run the seeded self-checks; writes verify.txt.
    Verify {
        #[arg(long, hide = true)]
        corrupt_k0: bool,
    },
    /// Closed-form values.
    Oracle {
        #[command(subcommand)]
        which: Oracle,
    },
    /// Locate the threshold values of sigma, beta and mu; writes thresholds.json.
    Thresholds,
    /// Print the effective configuration as TOML.
    Config,
}

#[derive(Subcommand)]
enum Oracle {
    /// Soliton constants and energy for the configured p and mu.
    Soliton,
    /// K0 at the given points.
    K0 {
        #[arg(long, required = true, allow_hyphen_values = true)]
        x: Vec<f64>,
    },
}

fn run(cli: Cli) -> Result<u8> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config.apply(&Overrides {
        seed: cli.seed,
        out: cli.out,
        alpha: cli.alpha,
        sigma: cli.sigma,
        beta: cli.beta,
        p: cli.p,
        r: cli.r,
        mu: cli.mu,
    });
    let resolved = config.resolve()?;
    match cli.command {
        Command::Solve => commands::cmd_solve(&config, &resolved),
        Command::Sweep => commands::cmd_sweep(&config, &resolved),
        Command::Verify { corrupt_k0 } => commands::cmd_verify(&config, corrupt_k0),
        Command::Oracle { which: Oracle::Soliton } => commands::cmd_oracle_soliton(&config),
        Command::Oracle { which: Oracle::K0 { x } } => commands::cmd_oracle_k0(&x),
        Command::Thresholds => commands::cmd_thresholds(&config, &resolved),
        Command::Config => {
            print!("{}", config.to_toml()?);
            Ok(exit::CONVERGED)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // keep clap's usage errors off the outcome statuses
            return ExitCode::from(if e.use_stderr() { exit::ERROR } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::ERROR)
        }
    }
}
