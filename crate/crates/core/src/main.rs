use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ringsfwm::scenario::{self, Overrides, Pipeline};
use ringsfwm::{estimate_nonlinear_couplings, Error, MaterialEstimate};

/// Photon-pair generation in a lossy microring resonator.
#[derive(Parser)]
#[command(name = "ringsfwm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write jsi.csv, pair_amplitude.csv and observables.json.
    Run {
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run the scenario's sweep section and write sweep.csv.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Estimate λ, η and ζ (rad/s) from material parameters.
    Estimate {
        /// χ⁽³⁾ in m²/V².
        #[arg(long)]
        chi3: f64,
        /// Refractive index.
        #[arg(long)]
        n: f64,
        /// Mode volume in m³.
        #[arg(long)]
        mode_volume: f64,
        /// Pump angular frequency in rad/s.
        #[arg(long)]
        omega_p: f64,
    },
}

#[derive(Args)]
struct RunFlags {
    /// Output directory (default: the scenario's, else out/<config stem>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Points per spectral axis.
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long, value_enum)]
    pipeline: Option<Pipeline>,
    /// Relative tolerance of the spectral and time-step halving checks.
    #[arg(long)]
    tol: Option<f64>,
}

impl From<RunFlags> for Overrides {
    fn from(f: RunFlags) -> Self {
        Overrides {
            out: f.out,
            grid_n: f.grid_n,
            pipeline: f.pipeline,
            tol: f.tol,
        }
    }
}

const EXIT_ERROR: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CHECKS: u8 = 3;

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("RINGSFWM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| format!("RINGSFWM_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        return Err("RINGSFWM_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn report_error(e: &Error) -> ExitCode {
    eprintln!("error [{}]: {e}", e.provenance());
    match e {
        Error::Config { .. } | Error::Json(_) => ExitCode::from(EXIT_CONFIG),
        _ => ExitCode::from(EXIT_ERROR),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error [config]: {msg}");
        return ExitCode::from(EXIT_CONFIG);
    }
    match cli.command {
        Command::Run { config, flags } => match scenario::run_scenario(&config, &flags.into()) {
            Ok((outcome, written)) => {
                for w in &outcome.prepared.warnings {
                    eprintln!("warning: {w}");
                }
                for path in &written {
                    println!("wrote {}", path.display());
                }
                let mut code = ExitCode::SUCCESS;
                for c in outcome.failed() {
                    eprintln!("check failed: {} = {:?} (tolerance {:e})", c.name, c.value, c.tolerance);
                    code = ExitCode::from(EXIT_CHECKS);
                }
                code
            }
            Err(e) => report_error(&e),
        },
        Command::Sweep { config, flags } => match scenario::sweep(&config, &flags.into()) {
            Ok((table, path)) => {
                println!("wrote {} ({} rows, {} pair functions computed)", path.display(), table.rows.len(), table.pair_functions_computed);
                if table.all_passed() {
                    ExitCode::SUCCESS
                } else {
                    eprintln!("some rows failed their checks; see the all_checks_passed column");
                    ExitCode::from(EXIT_CHECKS)
                }
            }
            Err(e) => report_error(&e),
        },
        Command::Estimate { chi3, n, mode_volume, omega_p } => {
            let m = MaterialEstimate {
                chi3,
                n,
                mode_volume,
                omega_p,
            };
            match estimate_nonlinear_couplings(&m) {
                Ok(c) => {
                    println!("{}", serde_json::json!({ "lambda_rad_per_s": c.lambda, "eta_rad_per_s": c.eta, "zeta_rad_per_s": c.zeta }));
                    ExitCode::SUCCESS
                }
                Err(e) => report_error(&e),
            }
        }
    }
}
