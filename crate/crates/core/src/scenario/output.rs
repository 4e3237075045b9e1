use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use super::run::{Check, PathConsistency, ScenarioOutcome};
use crate::error::Result;
use crate::model::{DerivedRates, ModeRates};
use crate::numerics::{Grid2D, SpectralGrid};
use crate::propagator::PropagatorDiagnostics;
use crate::sfwm::{AmplitudeSummary, PairObservables};

pub const FORMAT_VERSION: &str = "ringsfwm-observables/1";

fn axis_comment(w: &mut impl Write, label: &str, axis: &SpectralGrid) -> std::io::Result<()> {
    writeln!(
        w,
        "# axis_{label}: kappa rad/m, start={:e}, step={:e}, points={}",
        axis.point(0),
        axis.step(),
        axis.len()
    )
}

/// `#` metadata lines, a header row, then one row per grid point with the
/// signal index varying slowest.
pub fn write_real_grid(path: &Path, quantity: &str, grid: &Grid2D<f64>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "# quantity: {quantity}")?;
    axis_comment(&mut w, "signal", &grid.axis_s)?;
    axis_comment(&mut w, "idler", &grid.axis_i)?;
    writeln!(w, "kappa_signal_rad_per_m,kappa_idler_rad_per_m,value")?;
    let (ns, ni) = grid.shape();
    for js in 0..ns {
        for ji in 0..ni {
            writeln!(w, "{:e},{:e},{:e}", grid.axis_s.point(js), grid.axis_i.point(ji), grid.get(js, ji))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_complex_grid(path: &Path, quantity: &str, grid: &Grid2D<Complex64>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "# quantity: {quantity}")?;
    axis_comment(&mut w, "signal", &grid.axis_s)?;
    axis_comment(&mut w, "idler", &grid.axis_i)?;
    writeln!(w, "kappa_signal_rad_per_m,kappa_idler_rad_per_m,re,im")?;
    let (ns, ni) = grid.shape();
    for js in 0..ns {
        for ji in 0..ni {
            let z = grid.get(js, ji);
            writeln!(w, "{:e},{:e},{:e},{:e}", grid.axis_s.point(js), grid.axis_i.point(ji), z.re, z.im)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Units {
    rates: &'static str,
    wavevector: &'static str,
    pump_amplitude: &'static str,
    probabilities: &'static str,
    fwhm: &'static str,
    jsi_csv: &'static str,
    pair_amplitude_csv: &'static str,
}

const UNITS: Units = Units {
    rates: "angular rates in s^-1 without a factor of 2π; an input quoted as 10 GHz means 1e10 s^-1",
    wavevector: "offsets κ from the reference wavevector in rad/m",
    pump_amplitude: "m^(1/2); ∫|α_P(κ)|² dκ is the mean incoming pump photon number",
    probabilities: "pulse-integrated, arbitrary overall scale; only ratios are absolute",
    fwhm: "rad/m",
    jsi_csv: "joint spectral intensity scaled to unit peak",
    pair_amplitude_csv: "⟨c_S(κ)c_I(κ′)⟩ in m (per unit κ and κ′)",
};

#[derive(Serialize)]
struct ModeRatesOut {
    channel_per_s: f64,
    loss_per_s: f64,
    total_per_s: f64,
    critically_coupled: bool,
}

impl From<&ModeRates> for ModeRatesOut {
    fn from(r: &ModeRates) -> Self {
        ModeRatesOut {
            channel_per_s: r.channel,
            loss_per_s: r.loss,
            total_per_s: r.total,
            critically_coupled: r.critically_coupled,
        }
    }
}

#[derive(Serialize)]
struct RatesOut {
    pump: ModeRatesOut,
    signal: ModeRatesOut,
    idler: ModeRatesOut,
    detuning_rad_per_s: f64,
}

fn rates_out(r: &DerivedRates, detuning: f64) -> RatesOut {
    RatesOut {
        pump: (&r.pump).into(),
        signal: (&r.signal).into(),
        idler: (&r.idler).into(),
        detuning_rad_per_s: detuning,
    }
}

#[derive(Serialize)]
struct AxisOut {
    half_width_rad_per_m: f64,
    step_rad_per_m: f64,
    points: usize,
}

impl From<&SpectralGrid> for AxisOut {
    fn from(a: &SpectralGrid) -> Self {
        AxisOut {
            half_width_rad_per_m: a.half_width(),
            step_rad_per_m: a.step(),
            points: a.len(),
        }
    }
}

#[derive(Serialize)]
struct TimeOut {
    start_s: f64,
    end_s: f64,
    steps: usize,
}

#[derive(Serialize)]
struct GridsOut {
    signal: AxisOut,
    idler: AxisOut,
    time: Option<TimeOut>,
}

#[derive(Serialize)]
struct SinglesRatio {
    /// P_singles/P_coincidences from the perturbative grids; null when
    /// not computed or when no pairs reach the bus.
    numeric: Option<f64>,
    formula: Option<f64>,
    rel_dev: Option<f64>,
    numeric_status: &'static str,
}

#[derive(Serialize)]
struct PumpOut {
    mean_incoming_photon_number: f64,
    peak_intracavity_photon_number: Option<f64>,
    spm_spectrum_in_perturbative: bool,
}

#[derive(Serialize)]
struct PropagatorOut<'a> {
    summary: &'a AmplitudeSummary,
    diagnostics: &'a PropagatorDiagnostics,
    pump_ode_error_estimate: Option<f64>,
    pump_truncated: bool,
}

#[derive(Serialize)]
struct Flags {
    zeta_neglected_in_perturbative: bool,
    strong_pump_unvalidated: bool,
    all_checks_passed: bool,
}

#[derive(Serialize)]
struct Report<'a> {
    format: &'static str,
    name: Option<&'a str>,
    pipeline: &'static str,
    units: Units,
    rates: RatesOut,
    pump: PumpOut,
    grids: GridsOut,
    r: SinglesRatio,
    perturbative: Option<&'a PairObservables>,
    propagator: Option<PropagatorOut<'a>>,
    path_consistency: Option<&'a PathConsistency>,
    checks: &'a [Check],
    flags: Flags,
    warnings: &'a [String],
}

pub fn observables_json(o: &ScenarioOutcome) -> Result<String> {
    let p = &o.prepared;
    let obs = o.perturbative.as_ref().map(|r| &r.observables);
    let r_formula = crate::model::singles_ratio_closed_form(&o.rates);
    let numeric_status = match obs {
        None => "not computed (perturbative pipeline not run)",
        Some(x) if x.r.is_none() => "undefined (no pairs reach the bus)",
        Some(_) => "computed",
    };
    let report = Report {
        format: FORMAT_VERSION,
        name: p.scenario.name.as_deref(),
        pipeline: p.scenario.pipeline.label(),
        units: UNITS,
        rates: rates_out(&o.rates, p.system.detuning()),
        pump: PumpOut {
            mean_incoming_photon_number: p.pump.mean_photon_number(p.system.pump().v),
            peak_intracavity_photon_number: o.propagator.as_ref().map(|t| t.peak_intracavity_photon_number),
            spm_spectrum_in_perturbative: o.perturbative.as_ref().is_some_and(|r| r.spm_pump),
        },
        grids: GridsOut {
            signal: (&p.axis_s).into(),
            idler: (&p.axis_i).into(),
            time: p.time_grid.map(|g| TimeOut {
                start_s: g.t0(),
                end_s: g.t1(),
                steps: g.n_steps(),
            }),
        },
        r: SinglesRatio {
            numeric: obs.and_then(|x| x.r),
            formula: r_formula,
            rel_dev: obs.and_then(|x| x.r_rel_dev),
            numeric_status,
        },
        perturbative: obs,
        propagator: o.propagator.as_ref().map(|t| PropagatorOut {
            summary: &t.summary,
            diagnostics: &t.diagnostics,
            pump_ode_error_estimate: t.pump_ode_error_estimate,
            pump_truncated: t.pump_truncated,
        }),
        path_consistency: o.path_consistency.as_ref(),
        checks: &o.checks,
        flags: Flags {
            zeta_neglected_in_perturbative: o.perturbative.is_some() && p.system.zeta() != 0.0,
            strong_pump_unvalidated: o.propagator.as_ref().is_some_and(|t| t.diagnostics.strong_pump_unvalidated),
            all_checks_passed: o.all_passed(),
        },
        warnings: &p.warnings,
    };
    let mut s = serde_json::to_string_pretty(&report)?;
    s.push('\n');
    Ok(s)
}

/// Writes every artifact of `o` into `dir` and returns the paths written.
pub fn write_outputs(o: &ScenarioOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let out = &o.prepared.scenario.outputs;
    let mut written = Vec::new();
    let mut emit = |name: &str, f: &dyn Fn(&Path) -> Result<()>| -> Result<()> {
        let path = dir.join(name);
        f(&path)?;
        written.push(path);
        Ok(())
    };
    let jsi_label = "normalized joint spectral intensity |S|^2/max|S|^2";
    let amp_label = "pair amplitude S(kappa_s, kappa_i), real and imaginary parts";
    match (&o.perturbative, &o.propagator) {
        (Some(pt), td) => {
            if out.jsi {
                emit("jsi.csv", &|p| write_real_grid(p, jsi_label, &pt.jsi))?;
            }
            if out.pair_amplitude {
                emit("pair_amplitude.csv", &|p| write_complex_grid(p, amp_label, &pt.amplitude))?;
            }
            if let Some(td) = td {
                if out.jsi {
                    emit("jsi_propagator.csv", &|p| write_real_grid(p, jsi_label, &td.amplitude.norm_sqr().normalized()))?;
                }
                if out.pair_amplitude {
                    emit("pair_amplitude_propagator.csv", &|p| write_complex_grid(p, amp_label, &td.amplitude))?;
                }
            }
        }
        (None, Some(td)) => {
            if out.jsi {
                emit("jsi.csv", &|p| write_real_grid(p, jsi_label, &td.amplitude.norm_sqr().normalized()))?;
            }
            if out.pair_amplitude {
                emit("pair_amplitude.csv", &|p| write_complex_grid(p, amp_label, &td.amplitude))?;
            }
        }
        (None, None) => {}
    }
    let json = observables_json(o)?;
    emit("observables.json", &|p| Ok(fs::write(p, &json)?))?;
    Ok(written)
}
