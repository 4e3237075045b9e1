//! Declarative scenarios: a JSON description of the ring, the pump, the
//! grids and the pipelines to run, and the artifacts written for it.

mod config;
mod output;
mod run;
mod sweep;

pub use config::{GridConfig, ModeConfig, OutputConfig, Pipeline, PumpConfig, Scenario, SweepConfig, SystemConfig, Tolerances};
pub use output::{observables_json, write_complex_grid, write_outputs, write_real_grid, FORMAT_VERSION};
pub use run::{
    evaluate, execute, path_consistency, prepare, Check, PairFunctionCache, PathConsistency, PerturbativeResult, Prepared,
    PropagatorResult, ScenarioOutcome,
};
pub use sweep::{run_sweep, set_path, SweepRow, SweepTable};

use std::path::{Path, PathBuf};

use crate::error::Result;

/// Command-line overrides applied on top of a scenario file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub grid_n: Option<usize>,
    pub pipeline: Option<Pipeline>,
    /// Convergence tolerance for the spectral and time-step halving checks.
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, s: &mut Scenario) {
        if let Some(n) = self.grid_n {
            s.grids.spectral_points = n;
        }
        if let Some(p) = self.pipeline {
            s.pipeline = p;
        }
        if let Some(t) = self.tol {
            s.tolerances.resolution_rel = t;
            s.tolerances.time_domain_rel = t;
        }
        if let Some(out) = &self.out {
            s.outputs.dir = Some(out.clone());
        }
    }
}

/// Output directory: the configured one, else `out/<file stem>`.
pub fn output_dir(s: &Scenario, config_path: &Path) -> PathBuf {
    s.outputs.dir.clone().unwrap_or_else(|| {
        let stem = config_path.file_stem().and_then(|x| x.to_str()).unwrap_or("scenario");
        Path::new("out").join(stem)
    })
}

/// Loads, runs and writes one scenario.
pub fn run_scenario(path: &Path, overrides: &Overrides) -> Result<(ScenarioOutcome, Vec<PathBuf>)> {
    let mut s = Scenario::load(path)?;
    overrides.apply(&mut s);
    let outcome = evaluate(&s)?;
    let written = write_outputs(&outcome, &output_dir(&s, path))?;
    Ok((outcome, written))
}

/// Loads a scenario with a sweep section, runs it and writes `sweep.csv`.
pub fn sweep(path: &Path, overrides: &Overrides) -> Result<(SweepTable, PathBuf)> {
    let mut s = Scenario::load(path)?;
    overrides.apply(&mut s);
    let table = run_sweep(&s)?;
    let dir = output_dir(&s, path);
    std::fs::create_dir_all(&dir)?;
    let csv = dir.join("sweep.csv");
    table.write(&csv)?;
    Ok((table, csv))
}
