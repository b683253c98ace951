use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lambda_de::dynamics::PropagationOptions;

mod commands;
mod output;

use output::{CliError, Output};

/// Dynamical elimination experiments for a three-level Lambda system.
///
/// Time is measured in pulse durations t_p. Areas are given in multiples of
/// pi (S/pi) and frequencies as cycles per pulse duration, (omega/2pi) t_p.
#[derive(Parser, Debug)]
#[command(name = "lambda-de", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalArgs {
    /// Directory for all output files.
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,

    /// Worker threads for grid sweeps; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    /// Table format of the outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Reserved. The simulations are noise-free and ignore it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Propagator convergence tolerance on the final state.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,

    /// Maximum number of step halvings before giving up (exit code 3).
    #[arg(long, global = true, default_value_t = 14)]
    pub max_refinements: usize,
}

impl GlobalArgs {
    pub fn propagation(&self) -> PropagationOptions {
        PropagationOptions { tolerance: self.tolerance, max_refinements: self.max_refinements, ..Default::default() }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// CSV tables, grids with a JSON metadata sidecar.
    Csv,
    /// JSON documents only.
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single pulse from |+1>: field shapes and population dynamics.
    Dynamics(commands::DynamicsArgs),
    /// Pi-pulse infidelity over envelope area and modulation frequency (DE)
    /// or single-photon detuning (AE).
    InfidelityMap(commands::MapArgs),
    /// Pi/2-pulse infidelity versus relative detuning for DE and AE, with the
    /// width of the low-infidelity window.
    Robustness(commands::RobustnessArgs),
    /// Double-quantum Ramsey fringes, contrast and phase-shift maps.
    Ramsey(commands::RamseyArgs),
    /// Any metric over envelope area and one scanned parameter.
    Sweep(commands::SweepArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.global.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.jobs)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    }
    let mut out = Output::new(&cli.global);
    let (name, params) = match &cli.command {
        Command::Dynamics(a) => ("dynamics", commands::dynamics(a, &cli.global, &mut out)?),
        Command::InfidelityMap(a) => ("infidelity-map", commands::infidelity_map(a, &cli.global, &mut out)?),
        Command::Robustness(a) => ("robustness", commands::robustness(a, &cli.global, &mut out)?),
        Command::Ramsey(a) => ("ramsey", commands::ramsey(a, &cli.global, &mut out)?),
        Command::Sweep(a) => ("sweep", commands::sweep(a, &cli.global, &mut out)?),
    };
    let manifest = out.finish(name, &cli.global, params)?;
    println!("manifest: {}", manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
