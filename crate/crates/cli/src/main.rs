use clap::{Args, Parser, Subcommand};

use dce_cli::commands::{self, CliError};
use dce_cli::config::{load_config, RunConfig};
use dce_core::propagator::{TOL_MAX, TOL_MIN};

/// Kinetic-energy signatures of parametrically generated cavity photons:
/// closed forms, ODE cross-checks, density-matrix oracle, parameter sweeps.
#[derive(Parser)]
#[command(name = "dce", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form outputs at the configured point
    Analytic(CommonArgs),
    /// Integrate the operator flow and compare against the closed forms
    Simulate(CommonArgs),
    /// Run every named cross-validation check; exit 0 only if all pass
    Validate(CommonArgs),
    /// Tabulate outputs over the configured parameter grid into CSV
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the TOML run configuration
    #[arg(long)]
    config: String,
    /// Override the output CSV path
    #[arg(long)]
    out: Option<String>,
    /// Override the integration tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Override the worker count (0 = one per core)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Override the output SVG path
    #[arg(long)]
    svg: Option<String>,
}

/// Apply command-line overrides so the echoed config reflects what actually
/// ran.
fn apply_overrides(config: &mut RunConfig, args: &CommonArgs) -> Result<(), CliError> {
    if let Some(out) = &args.out {
        config.csv_out = Some(out.clone());
    }
    if let Some(tol) = args.tol {
        if !(TOL_MIN..=TOL_MAX).contains(&tol) {
            return Err(CliError::Config(format!(
                "tol {tol:e} outside [{TOL_MIN:e}, {TOL_MAX:e}]"
            )));
        }
        config.tol = tol;
    }
    if let Some(workers) = args.workers {
        config.workers = workers;
    }
    Ok(())
}

fn dispatch(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Analytic(args) => {
            let mut config = load_config(&args.config)?;
            apply_overrides(&mut config, args)?;
            commands::cmd_analytic(&config)
        }
        Command::Simulate(args) => {
            let mut config = load_config(&args.config)?;
            apply_overrides(&mut config, args)?;
            commands::cmd_simulate(&config)
        }
        Command::Validate(args) => {
            let mut config = load_config(&args.config)?;
            apply_overrides(&mut config, args)?;
            commands::cmd_validate(&config)
        }
        Command::Sweep(args) => {
            let mut config = load_config(&args.common.config)?;
            apply_overrides(&mut config, &args.common)?;
            if let Some(svg) = &args.svg {
                config.svg_out = Some(svg.clone());
            }
            commands::cmd_sweep(&config)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
