use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::config::{Pipeline, Scenario};
use crate::error::{Error, Result};
use crate::model::{DerivedRates, RingSystem};
use crate::numerics::{Grid2D, SpectralGrid, TimeGrid};
use crate::propagator::{
    build_drive_matrix, pair_amplitude_time_domain, pump_for_propagator, PropagatorDiagnostics, TimeDomainOptions, PUMP_REFINEMENT,
};
use crate::pump::{pump_time_evolution, IntracavityPump, PumpShape, PumpSpec};
use crate::sfwm::{
    amplitude_summary, jsi_closed_form, observables_unchecked, pair_amplitude, points_per_width, pump_pair_function,
    response_kernels, AmplitudeSummary, PairObservables, PumpPairFunction,
};

/// Phase advance κv·dt per step above which the time-domain phase factors
/// are under-resolved.
const MAX_PHASE_PER_STEP: f64 = 0.2;

/// Scenario with its physical objects built and its grids resolved.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub scenario: Scenario,
    pub system: RingSystem,
    pub pump: PumpSpec,
    pub axis_s: SpectralGrid,
    pub axis_i: SpectralGrid,
    pub time_grid: Option<TimeGrid>,
    pub warnings: Vec<String>,
}

fn time_grid(scenario: &Scenario, sys: &RingSystem, pump: &PumpSpec) -> Result<TimeGrid> {
    let g = &scenario.grids;
    let slowest = [sys.pump(), sys.signal(), sys.idler()].iter().map(|m| m.total_rate()).fold(f64::INFINITY, f64::min);
    let (t0, t1) = match (g.time_start_s, g.time_end_s, pump.duration()) {
        (Some(a), Some(b), _) => (a, b),
        (a, b, Some(sigma)) => (a.unwrap_or(-6.0 * sigma), b.unwrap_or(6.0 * sigma + g.tail_lifetimes / slowest)),
        _ => {
            return Err(Error::Config {
                field: "grids.time_start_s".into(),
                reason: "tabulated pumps need an explicit time_start_s and time_end_s".into(),
            })
        }
    };
    TimeGrid::new(t0, t1, g.time_steps)
}

pub fn prepare(scenario: &Scenario) -> Result<Prepared> {
    let system = scenario.system()?;
    let pump = scenario.pump_spec()?;
    let g = &scenario.grids;
    let mut warnings = Vec::new();
    let axis_for = |mode: &crate::model::ModeParams| {
        let hw = g.half_width_rad_per_m.unwrap_or(g.half_width_linewidths * mode.total_rate() / mode.v);
        SpectralGrid::new(hw, g.spectral_points)
    };
    let axis_s = axis_for(system.signal())?;
    let axis_i = axis_for(system.idler())?;

    if g.spectral_points.is_multiple_of(2) {
        warnings.push("even spectral_points: κ = 0 is not sampled".to_string());
    }
    let (ps, pi) = points_per_width(&system, &axis_s, &axis_i);
    if ps.min(pi) < scenario.tolerances.min_points_per_width {
        warnings.push(format!(
            "spectral grid has {:.2} samples per ring linewidth, below {}",
            ps.min(pi),
            scenario.tolerances.min_points_per_width
        ));
    }
    for (name, axis, mode) in [("signal", &axis_s, system.signal()), ("idler", &axis_i, system.idler())] {
        let widths = axis.half_width() * mode.v / mode.total_rate();
        if widths < 5.0 {
            warnings.push(format!("{name} axis spans only ±{widths:.2} linewidths; Lorentzian tails are truncated"));
        }
    }
    if let Some(sigma) = pump.duration() {
        let pump_width = 2.0 / (system.pump().v * sigma);
        let step = axis_s.step().max(axis_i.step());
        if pump_width / step < 3.0 {
            warnings.push(format!("pump bandwidth 2/(vσ) = {pump_width:.4e} rad/m spans fewer than three spectral steps"));
        }
    }

    let needs_time = scenario.pipeline.propagator() || system.eta() != 0.0;
    let time_grid = if needs_time {
        let tg = time_grid(scenario, &system, &pump)?;
        let kv = (axis_s.half_width() * system.signal().v).max(axis_i.half_width() * system.idler().v);
        if scenario.pipeline.propagator() && kv * tg.dt() > MAX_PHASE_PER_STEP {
            warnings.push(format!(
                "time step {:.3e} s advances the edge phase by {:.3} rad per step (aim for ≤ {MAX_PHASE_PER_STEP})",
                tg.dt(),
                kv * tg.dt()
            ));
        }
        Some(tg)
    } else {
        None
    };

    Ok(Prepared {
        scenario: scenario.clone(),
        system,
        pump,
        axis_s,
        axis_i,
        time_grid,
        warnings,
    })
}

#[derive(Clone, Debug)]
pub struct PerturbativeResult {
    pub pair_function: Arc<PumpPairFunction>,
    pub amplitude: Grid2D<Complex64>,
    pub jsi: Grid2D<f64>,
    pub observables: PairObservables,
    /// Pump spectrum taken from the SPM time-domain solution.
    pub spm_pump: bool,
}

#[derive(Clone, Debug)]
pub struct PropagatorResult {
    pub amplitude: Grid2D<Complex64>,
    pub summary: AmplitudeSummary,
    pub diagnostics: PropagatorDiagnostics,
    pub pump_ode_error_estimate: Option<f64>,
    pub pump_truncated: bool,
    pub peak_intracavity_photon_number: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathConsistency {
    /// max|S_td − S_pt| / max|S_pt|.
    pub peak_rel_dev: Option<f64>,
    /// ‖S_td − S_pt‖₂ / ‖S_pt‖₂.
    pub l2_rel_dev: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: Option<f64>,
    pub tolerance: f64,
}

#[derive(Clone, Debug)]
pub struct ScenarioOutcome {
    pub prepared: Prepared,
    pub rates: DerivedRates,
    pub perturbative: Option<PerturbativeResult>,
    pub propagator: Option<PropagatorResult>,
    pub path_consistency: Option<PathConsistency>,
    pub checks: Vec<Check>,
}

impl ScenarioOutcome {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Cache for the pump-pair function, keyed by every input it depends on.
#[derive(Default)]
pub struct PairFunctionCache {
    entries: Vec<(String, Arc<PumpPairFunction>)>,
}

impl PairFunctionCache {
    fn key(p: &Prepared) -> String {
        let sys = &p.system;
        let spm = (sys.eta() != 0.0).then(|| (sys.eta(), p.time_grid, p.scenario.grids.pump_spectral_points));
        serde_json::json!({
            "pump": p.scenario.pump,
            "pump_mode": sys.pump(),
            "detuning": sys.detuning(),
            "v": [sys.signal().v, sys.idler().v],
            "axes": [p.axis_s, p.axis_i],
            "tol": p.scenario.tolerances.pair_function_rel,
            "spm": spm.map(|(eta, tg, n)| serde_json::json!([eta, tg.map(|g| [g.t0(), g.t1(), g.n_steps() as f64]), n])),
        })
        .to_string()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn get_or_insert(&mut self, key: String, f: impl FnOnce() -> Result<PumpPairFunction>) -> Result<Arc<PumpPairFunction>> {
        if let Some((_, v)) = self.entries.iter().find(|(k, _)| *k == key) {
            return Ok(v.clone());
        }
        let v = Arc::new(f()?);
        self.entries.push((key, v.clone()));
        Ok(v)
    }
}

fn intracavity_pump(p: &Prepared) -> Result<IntracavityPump> {
    let sys = &p.system;
    if sys.eta() == 0.0 {
        return Ok(IntracavityPump::filtered(sys, &p.pump));
    }
    let tg = p.time_grid.expect("time grid is prepared whenever eta is nonzero");
    let hw = match &p.pump.shape {
        PumpShape::Gaussian { .. } => p.pump.support_half_width(sys.pump().v),
        PumpShape::Tabulated { grid, .. } => grid.half_width(),
    };
    let spectral = SpectralGrid::new(hw, p.scenario.grids.pump_spectral_points)?;
    let field = pump_time_evolution(sys, &p.pump, &tg.refined(PUMP_REFINEMENT), &spectral)?;
    Ok(field.spectral_amplitude())
}

fn run_perturbative(p: &Prepared, cache: &mut PairFunctionCache) -> Result<PerturbativeResult> {
    let f = cache.get_or_insert(PairFunctionCache::key(p), || {
        let pump = intracavity_pump(p)?;
        pump_pair_function(&pump, &p.system, &p.axis_s, &p.axis_i, p.scenario.tolerances.pair_function_rel)
    })?;
    let kernels = response_kernels(&p.system, &f);
    if !kernels.all_finite() {
        return Err(Error::NonFinite("response kernels"));
    }
    Ok(PerturbativeResult {
        amplitude: pair_amplitude(&kernels),
        jsi: jsi_closed_form(&p.system, &f).normalized,
        observables: observables_unchecked(&kernels, &p.system),
        pair_function: f,
        spm_pump: p.system.eta() != 0.0,
    })
}

fn run_propagator(p: &Prepared) -> Result<PropagatorResult> {
    let sys = &p.system;
    let tg = p.time_grid.expect("time grid is prepared for the propagator pipeline");
    let spectral = SpectralGrid::new(p.pump.support_half_width(sys.pump().v), 129)?;
    let pump = pump_for_propagator(sys, &p.pump, &tg, &spectral)?;
    let drive = build_drive_matrix(sys, &pump);
    let opts = TimeDomainOptions {
        tol: f64::INFINITY,
        check_halving: true,
    };
    let td = pair_amplitude_time_domain(sys, &drive, &tg, &p.axis_s, &p.axis_i, opts)?;
    Ok(PropagatorResult {
        summary: amplitude_summary(&td.amplitude),
        amplitude: td.amplitude,
        diagnostics: td.diagnostics,
        pump_ode_error_estimate: pump.ode_error_estimate,
        pump_truncated: pump.truncated,
        peak_intracavity_photon_number: pump.peak_photon_number(),
    })
}

pub fn path_consistency(td: &Grid2D<Complex64>, pt: &Grid2D<Complex64>) -> PathConsistency {
    let peak = pt.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let norm = pt.sum_norm_sqr().sqrt();
    let diff = td.values().iter().zip(pt.values()).map(|(a, b)| (a - b).norm());
    let max_dev = diff.clone().fold(0.0, f64::max);
    let l2 = diff.map(|d| d * d).sum::<f64>().sqrt();
    PathConsistency {
        peak_rel_dev: (peak > 0.0).then(|| max_dev / peak),
        l2_rel_dev: (norm > 0.0).then(|| l2 / norm),
    }
}

fn check(name: &'static str, value: Option<f64>, tolerance: f64) -> Check {
    Check {
        name,
        passed: value.is_none_or(|v| v <= tolerance),
        value,
        tolerance,
    }
}

/// Runs the configured pipelines on a prepared scenario.
pub fn execute(p: Prepared, cache: &mut PairFunctionCache) -> Result<ScenarioOutcome> {
    let pipeline = p.scenario.pipeline;
    let tol = p.scenario.tolerances.clone();
    let perturbative = pipeline.perturbative().then(|| run_perturbative(&p, cache)).transpose()?;
    let propagator = pipeline.propagator().then(|| run_propagator(&p)).transpose()?;
    let path = match (&perturbative, &propagator) {
        (Some(pt), Some(td)) => Some(path_consistency(&td.amplitude, &pt.amplitude)),
        _ => None,
    };

    let mut checks = Vec::new();
    let (ps, pi) = points_per_width(&p.system, &p.axis_s, &p.axis_i);
    checks.push(Check {
        name: "points_per_linewidth",
        passed: ps.min(pi) >= tol.min_points_per_width,
        value: Some(ps.min(pi)),
        tolerance: tol.min_points_per_width,
    });
    if let Some(pt) = &perturbative {
        checks.push(check("r_vs_closed_form", pt.observables.r_rel_dev, tol.r_rel));
        checks.push(check("spectral_halving", pt.observables.resolution_rel_change, tol.resolution_rel));
    }
    if let Some(td) = &propagator {
        checks.push(check("time_step_halving", td.diagnostics.halving_rel_change, tol.time_domain_rel));
        checks.push(Check {
            name: "weak_pump_regime",
            passed: !td.diagnostics.strong_pump_unvalidated,
            value: Some(td.diagnostics.peak_conversion_ratio),
            tolerance: crate::propagator::STRONG_PUMP_RATIO,
        });
        // Comparison with the perturbative solution only holds where it applies.
        if let Some(pc) = &path {
            if p.system.eta() == 0.0 && p.system.zeta() == 0.0 && !td.diagnostics.strong_pump_unvalidated {
                checks.push(check("path_consistency_peak", pc.peak_rel_dev, tol.path_peak_rel));
                checks.push(check("path_consistency_l2", pc.l2_rel_dev, tol.path_l2_rel));
            }
        }
    }
    let rates = p.system.derive_rates();
    Ok(ScenarioOutcome {
        prepared: p,
        rates,
        perturbative,
        propagator,
        path_consistency: path,
        checks,
    })
}

/// Prepares and runs one scenario.
pub fn evaluate(scenario: &Scenario) -> Result<ScenarioOutcome> {
    execute(prepare(scenario)?, &mut PairFunctionCache::default())
}

impl Pipeline {
    pub fn label(self) -> &'static str {
        match self {
            Pipeline::Perturbative => "perturbative",
            Pipeline::Propagator => "propagator",
            Pipeline::Both => "both",
        }
    }
}
