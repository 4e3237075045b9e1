//! Incoming coherent pump pulse and the classical intracavity pump
//! amplitude it drives, in both the spectral and the time domain.
//!
//! Normalisation: ∫|α_P(κ)|² dκ is the mean photon number of the incoming
//! pulse, which makes |β̄_P(t)|² an intracavity photon number.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModeParams, RingSystem};
use crate::numerics::interp::{lanczos_interpolate, sinc_interpolate};
use crate::numerics::{fourier_at, ode_solve, Direction, OdeOptions, SpectralGrid, TimeGrid, UniformAxis};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Fraction of the peak below which a sampled signal counts as decayed.
pub const DECAY_THRESHOLD: f64 = 1e-6;

/// A Gaussian amplitude has fallen to e^{−36} at this many units of 1/(vσ).
const GAUSSIAN_SUPPORT: f64 = 12.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PumpShape {
    /// α_P(κ) ∝ exp(−(κ v_P σ/2)²), pulse peaked at t = 0.
    Gaussian { duration: f64 },
    /// α_P(κ) ∝ tabulated samples, zero outside the table.
    Tabulated { grid: SpectralGrid, values: Vec<Complex64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PumpSpec {
    /// ᾱ_P, m^{1/2}, so that ∫|α_P(κ)|² dκ is the mean photon number.
    pub amplitude: Complex64,
    pub shape: PumpShape,
}

impl PumpSpec {
    pub fn gaussian(amplitude: Complex64, duration: f64) -> Result<Self> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::invalid("duration", format!("pulse duration must be positive, got {duration}")));
        }
        Ok(PumpSpec {
            amplitude,
            shape: PumpShape::Gaussian { duration },
        })
    }

    pub fn tabulated(amplitude: Complex64, grid: SpectralGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!("{} table values for {} grid points", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("tabulated pump spectrum"));
        }
        let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let edge = values[0].norm().max(values[values.len() - 1].norm());
        if edge > DECAY_THRESHOLD * peak {
            return Err(Error::Coverage {
                what: "tabulated pump spectrum edge decay",
                needed: DECAY_THRESHOLD * peak,
                available: edge,
            });
        }
        Ok(PumpSpec {
            amplitude,
            shape: PumpShape::Tabulated { grid, values },
        })
    }

    pub fn duration(&self) -> Option<f64> {
        match self.shape {
            PumpShape::Gaussian { duration } => Some(duration),
            PumpShape::Tabulated { .. } => None,
        }
    }

    pub fn with_amplitude(&self, amplitude: Complex64) -> Self {
        PumpSpec {
            amplitude,
            shape: self.shape.clone(),
        }
    }

    /// α_P(κ).
    pub fn incoming_at(&self, kappa: f64, v_p: f64) -> Complex64 {
        match &self.shape {
            PumpShape::Gaussian { duration } => {
                let x = kappa * v_p * duration / 2.0;
                self.amplitude * (-x * x).exp()
            }
            PumpShape::Tabulated { grid, values } => {
                if kappa.abs() > grid.half_width() {
                    return Complex64::new(0.0, 0.0);
                }
                self.amplitude * sinc_interpolate(values, &grid.axis(), kappa)
            }
        }
    }

    /// Half-width in κ beyond which α_P is negligible.
    pub fn support_half_width(&self, v_p: f64) -> f64 {
        match &self.shape {
            PumpShape::Gaussian { duration } => GAUSSIAN_SUPPORT / (v_p * duration),
            PumpShape::Tabulated { grid, .. } => grid.half_width(),
        }
    }

    /// Minimum spectral half-width a grid must span to hold this pulse.
    pub fn required_half_width(&self, v_p: f64) -> f64 {
        match &self.shape {
            PumpShape::Gaussian { duration } => 6.0 / (v_p * duration),
            PumpShape::Tabulated { grid, .. } => grid.half_width(),
        }
    }

    /// Incoming free field at the coupling point, ψ̄_{P<}(0,t) =
    /// ∫ dκ/√(2π) α_P(κ) e^{−iκ v_P t}.
    pub fn drive_at(&self, t: f64, v_p: f64) -> Complex64 {
        match &self.shape {
            PumpShape::Gaussian { duration } => {
                let s = duration;
                self.amplitude * (2f64.sqrt() / (v_p * s) * (-(t * t) / (s * s)).exp())
            }
            PumpShape::Tabulated { grid, values } => {
                let axis = grid.axis();
                self.amplitude * fourier_at(values, &axis, v_p, Direction::SpectrumToTime, &[t])[0]
            }
        }
    }

    /// ∫|α_P(κ)|² dκ.
    pub fn mean_photon_number(&self, v_p: f64) -> f64 {
        match &self.shape {
            PumpShape::Gaussian { duration } => self.amplitude.norm_sqr() * (2.0 * PI).sqrt() / (v_p * duration),
            PumpShape::Tabulated { grid, values } => {
                self.amplitude.norm_sqr() * values.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.step()
            }
        }
    }
}

/// Samples α_P(κ) on `grid`.
pub fn incoming_spectrum(spec: &PumpSpec, sys: &RingSystem, grid: &SpectralGrid) -> Result<Vec<Complex64>> {
    let v_p = sys.pump().v;
    let needed = spec.required_half_width(v_p);
    if let PumpShape::Gaussian { .. } = spec.shape {
        if grid.half_width() < needed {
            return Err(Error::Coverage {
                what: "pump spectral grid half-width",
                needed,
                available: grid.half_width(),
            });
        }
    }
    Ok(grid.points().into_iter().map(|k| spec.incoming_at(k, v_p)).collect())
}

/// Lorentzian ring filter −iγ_P*/(−iκ v_P + Γ̄_P).
pub fn ring_filter(pump: &ModeParams, kappa: f64) -> Complex64 {
    -I * pump.gamma.conj() / pump.resonance_denominator(kappa)
}

/// β̄_P(κ) = −iγ_P* α_P(κ)/(−iκv_P + Γ̄_P), pointwise on `grid`.
pub fn intracavity_spectrum(sys: &RingSystem, grid: &SpectralGrid, alpha: &[Complex64]) -> Result<Vec<Complex64>> {
    if alpha.len() != grid.len() {
        return Err(Error::Shape(format!("{} samples for {} grid points", alpha.len(), grid.len())));
    }
    Ok(grid
        .points()
        .into_iter()
        .zip(alpha)
        .map(|(k, a)| ring_filter(sys.pump(), k) * a)
        .collect())
}

/// Intracavity pump spectrum β̄_P(κ) evaluated at arbitrary κ.
#[derive(Clone, Debug)]
pub enum IntracavityPump {
    /// Linear Lorentzian filtering of an analytic or tabulated input.
    Filtered { spec: PumpSpec, pump: ModeParams },
    /// Samples (e.g. from the SPM time-domain solution), windowed-sinc
    /// interpolated and zero outside the table.
    Sampled { axis: UniformAxis, values: Vec<Complex64> },
}

const LANCZOS_LOBES: usize = 8;

impl IntracavityPump {
    pub fn filtered(sys: &RingSystem, spec: &PumpSpec) -> Self {
        IntracavityPump::Filtered {
            spec: spec.clone(),
            pump: *sys.pump(),
        }
    }

    pub fn at(&self, kappa: f64) -> Complex64 {
        match self {
            IntracavityPump::Filtered { spec, pump } => ring_filter(pump, kappa) * spec.incoming_at(kappa, pump.v),
            IntracavityPump::Sampled { axis, values } => {
                if kappa < axis.start || kappa > axis.end() {
                    Complex64::new(0.0, 0.0)
                } else {
                    lanczos_interpolate(values, axis, kappa, LANCZOS_LOBES)
                }
            }
        }
    }

    pub fn support_half_width(&self) -> f64 {
        match self {
            IntracavityPump::Filtered { spec, pump } => spec.support_half_width(pump.v),
            IntracavityPump::Sampled { axis, .. } => axis.start.abs().max(axis.end().abs()),
        }
    }

    /// Sampled spectra must have decayed at their edges.
    pub fn check_support(&self) -> Result<()> {
        if let IntracavityPump::Sampled { values, .. } = self {
            let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let edge = values[0].norm().max(values[values.len() - 1].norm());
            if edge > DECAY_THRESHOLD * peak {
                return Err(Error::Coverage {
                    what: "intracavity pump spectrum edge decay",
                    needed: DECAY_THRESHOLD * peak,
                    available: edge,
                });
            }
        }
        Ok(())
    }
}

/// Intracavity pump amplitude in both representations.
#[derive(Clone, Debug)]
pub struct PumpField {
    pub time_grid: TimeGrid,
    /// β̄_P(t) at every time-grid point.
    pub envelope: Vec<Complex64>,
    pub spectral_grid: SpectralGrid,
    /// β̄_P(κ) at every spectral-grid point.
    pub spectrum: Vec<Complex64>,
    /// |β̄_P(t)|².
    pub photon_number: Vec<f64>,
    /// Step-halving estimate of the envelope integration error.
    pub ode_error_estimate: Option<f64>,
    /// Envelope still above the decay threshold at the end of the grid.
    pub truncated: bool,
}

impl PumpField {
    /// β̄_P(t): exact on grid points, windowed-sinc between them.
    pub fn envelope_at(&self, t: f64) -> Result<Complex64> {
        if !self.time_grid.contains(t) {
            return Err(Error::Coverage {
                what: "pump envelope time span",
                needed: t,
                available: if t < self.time_grid.t0() { self.time_grid.t0() } else { self.time_grid.t1() },
            });
        }
        let axis = self.time_grid.axis();
        let u = (t - axis.start) / axis.step;
        let k = u.round();
        if (u - k).abs() < 1e-9 {
            return Ok(self.envelope[(k as usize).min(self.envelope.len() - 1)]);
        }
        Ok(lanczos_interpolate(&self.envelope, &axis, t, LANCZOS_LOBES))
    }

    pub fn spectral_amplitude(&self) -> IntracavityPump {
        IntracavityPump::Sampled {
            axis: self.spectral_grid.axis(),
            values: self.spectrum.clone(),
        }
    }

    pub fn peak_photon_number(&self) -> f64 {
        self.photon_number.iter().copied().fold(0.0, f64::max)
    }
}

/// Integrates dβ/dt = −(Γ̄_P + 2iη|β|²)β − iγ_P* ψ(t) from β(t0) = 0.
pub fn evolve_intracavity(
    sys: &RingSystem,
    drive: impl Fn(f64) -> Complex64,
    grid: &TimeGrid,
    opts: OdeOptions,
) -> Result<crate::numerics::Trajectory<Complex64>> {
    let gamma_bar = sys.pump().total_rate();
    let coupling = -I * sys.pump().gamma.conj();
    let eta = sys.eta();
    ode_solve(
        |t, b: &Complex64| -(gamma_bar + 2.0 * I * eta * b.norm_sqr()) * b + coupling * drive(t),
        grid,
        Complex64::new(0.0, 0.0),
        opts,
    )
}

/// Semiclassical undepleted pump on `time_grid`, with its spectrum sampled
/// on `spectral_grid`.
pub fn pump_time_evolution(sys: &RingSystem, spec: &PumpSpec, time_grid: &TimeGrid, spectral_grid: &SpectralGrid) -> Result<PumpField> {
    let v_p = sys.pump().v;
    let drive_samples: Vec<Complex64> = time_grid.times().iter().map(|&t| spec.drive_at(t, v_p)).collect();
    let drive_peak = drive_samples.iter().map(|d| d.norm()).fold(0.0, f64::max);
    if drive_samples[0].norm() > DECAY_THRESHOLD * drive_peak {
        return Err(Error::Coverage {
            what: "pump drive at grid start (vacuum initial condition)",
            needed: DECAY_THRESHOLD * drive_peak,
            available: drive_samples[0].norm(),
        });
    }

    let gamma_bar = sys.pump().total_rate();
    let scale = sys.pump().gamma.norm() * drive_peak / gamma_bar;
    let opts = OdeOptions {
        tol: (scale > 0.0).then_some(1e-9 * scale),
        max_refinements: 3,
        strict: false,
    };
    let trajectory = evolve_intracavity(sys, |t| spec.drive_at(t, v_p), time_grid, opts)?;
    let envelope = trajectory.states;
    let peak = envelope.iter().map(|b| b.norm()).fold(0.0, f64::max);
    let truncated = envelope.last().map(|b| b.norm()).unwrap_or(0.0) > DECAY_THRESHOLD * peak;

    let spectrum = fourier_at(&envelope, &time_grid.axis(), v_p, Direction::TimeToSpectrum, &spectral_grid.points());
    let photon_number = envelope.iter().map(|b| b.norm_sqr()).collect();
    Ok(PumpField {
        time_grid: *time_grid,
        envelope,
        spectral_grid: *spectral_grid,
        spectrum,
        photon_number,
        ode_error_estimate: trajectory.error_estimate,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModeParams;

    const V: f64 = 1.5e8;

    fn system(gamma_bar: f64, loss_fraction: f64, eta: f64) -> RingSystem {
        let m = ModeParams::from_rates(1.2e15, V, V, gamma_bar * (1.0 - loss_fraction), gamma_bar * loss_fraction).unwrap();
        RingSystem::new(m, m, m, Complex64::new(1.0, 0.0), eta, 0.0).unwrap()
    }

    #[test]
    fn gaussian_incoming_values() {
        let sigma = 1e-10;
        let spec = PumpSpec::gaussian(Complex64::new(0.3, 0.4), sigma).unwrap();
        assert_eq!(spec.incoming_at(0.0, V), Complex64::new(0.3, 0.4));
        let k = 2.0 / (V * sigma);
        assert!((spec.incoming_at(k, V) - Complex64::new(0.3, 0.4) * (-1f64).exp()).norm() < 1e-15);
        // 100 ps at 15 cm/ns: e⁻¹ half-width 2/(vσ) ≈ 133.3 rad/m.
        assert!((k - 133.333_333_333).abs() < 1e-6);
    }

    #[test]
    fn narrow_grid_rejected() {
        let sys = system(1e10, 0.0, 0.0);
        let spec = PumpSpec::gaussian(Complex64::new(1.0, 0.0), 1e-10).unwrap();
        let narrow = SpectralGrid::new(100.0, 64).unwrap();
        assert!(matches!(incoming_spectrum(&spec, &sys, &narrow), Err(Error::Coverage { .. })));
        let wide = SpectralGrid::new(400.0, 64).unwrap();
        assert_eq!(incoming_spectrum(&spec, &sys, &wide).unwrap().len(), 64);
    }

    #[test]
    fn gaussian_drive_matches_synthesised_drive() {
        let sigma = 1e-10;
        let spec = PumpSpec::gaussian(Complex64::new(1.0, 0.0), sigma).unwrap();
        let grid = SpectralGrid::new(16.0 / (V * sigma), 513).unwrap();
        let table: Vec<Complex64> = grid.points().iter().map(|&k| spec.incoming_at(k, V)).collect();
        for &t in &[-2.0 * sigma, -0.3 * sigma, 0.0, 0.7 * sigma, 1.9 * sigma] {
            let synth = fourier_at(&table, &grid.axis(), V, Direction::SpectrumToTime, &[t])[0];
            let exact = spec.drive_at(t, V);
            assert!((synth - exact).norm() < 1e-10 * spec.drive_at(0.0, V).norm());
        }
    }

    #[test]
    fn on_resonance_and_half_width_filter() {
        let sys = system(1e10, 0.5, 0.0);
        let alpha = Complex64::new(0.2, -0.1);
        let p = sys.pump();
        let b0 = ring_filter(p, 0.0) * alpha;
        assert!((b0 - (-I * p.gamma.conj() * alpha / p.total_rate())).norm() < 1e-12 * b0.norm());
        let k = p.total_rate() / p.v;
        let bh = ring_filter(p, k) * alpha;
        let expect = p.gamma.norm() * alpha.norm() / (p.total_rate() * 2f64.sqrt());
        assert!((bh.norm() - expect).abs() < 1e-12 * expect);
    }

    fn relative_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn ode_spectrum_matches_lorentzian_filter() {
        for sigma in [1e-10, 1e-9] {
            let sys = system(1e10, 0.5, 0.0);
            let spec = PumpSpec::gaussian(Complex64::new(1.0, 0.0), sigma).unwrap();
            let grid = TimeGrid::for_pulse(sigma, 1e10, 20.0, 8192).unwrap();
            let sgrid = SpectralGrid::new(8.0 / (V * sigma), 257).unwrap();
            let field = pump_time_evolution(&sys, &spec, &grid, &sgrid).unwrap();
            let alpha = incoming_spectrum(&spec, &sys, &sgrid).unwrap();
            let filtered = intracavity_spectrum(&sys, &sgrid, &alpha).unwrap();
            let err = relative_l2(&field.spectrum, &filtered);
            assert!(err < 1e-4, "σ={sigma}: {err}");
            assert!(!field.truncated);
        }
    }

    #[test]
    fn no_drive_no_field() {
        let sys = system(1e10, 0.0, 0.0);
        let spec = PumpSpec::gaussian(Complex64::new(0.0, 0.0), 1e-10).unwrap();
        let grid = TimeGrid::for_pulse(1e-10, 1e10, 20.0, 512).unwrap();
        let field = pump_time_evolution(&sys, &spec, &grid, &SpectralGrid::new(1000.0, 64).unwrap()).unwrap();
        assert!(field.envelope.iter().all(|b| b.norm() == 0.0));
    }

    #[test]
    fn late_start_rejected() {
        let sys = system(1e10, 0.0, 0.0);
        let spec = PumpSpec::gaussian(Complex64::new(1.0, 0.0), 1e-10).unwrap();
        let grid = TimeGrid::new(-2e-10, 2e-9, 512).unwrap();
        let r = pump_time_evolution(&sys, &spec, &grid, &SpectralGrid::new(1000.0, 64).unwrap());
        assert!(matches!(r, Err(Error::Coverage { .. })));
    }

    #[test]
    fn linear_in_amplitude_without_spm() {
        let sys = system(1e10, 0.3, 0.0);
        let grid = TimeGrid::for_pulse(1e-10, 1e10, 20.0, 1024).unwrap();
        let sgrid = SpectralGrid::new(1000.0, 65).unwrap();
        let c = Complex64::new(-1.5, 2.0);
        let a = pump_time_evolution(&sys, &PumpSpec::gaussian(Complex64::new(1.0, 0.0), 1e-10).unwrap(), &grid, &sgrid).unwrap();
        let b = pump_time_evolution(&sys, &PumpSpec::gaussian(c, 1e-10).unwrap(), &grid, &sgrid).unwrap();
        let peak = a.envelope.iter().map(|x| x.norm()).fold(0.0, f64::max);
        for (x, y) in a.envelope.iter().zip(&b.envelope) {
            assert!((x * c - y).norm() <= 1e-12 * peak * c.norm());
        }
    }

    #[test]
    fn tail_decays_at_total_rate() {
        let sys = system(1e10, 0.5, 0.0);
        let sigma = 1e-10;
        let spec = PumpSpec::gaussian(Complex64::new(1.0, 0.0), sigma).unwrap();
        let grid = TimeGrid::for_pulse(sigma, 1e10, 20.0, 4096).unwrap();
        let field = pump_time_evolution(&sys, &spec, &grid, &SpectralGrid::new(1000.0, 65).unwrap()).unwrap();
        let drive_peak = spec.drive_at(0.0, V).norm();
        let times = grid.times();
        let tail: Vec<(f64, f64)> = times
            .iter()
            .zip(&field.envelope)
            .filter(|(&t, _)| t > 0.0 && spec.drive_at(t, V).norm() < 1e-6 * drive_peak)
            .map(|(&t, b)| (t, b.norm().ln()))
            .collect();
        let n = tail.len() as f64;
        let (sx, sy) = tail.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / n, sy / n);
        let slope = tail.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / tail.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
        assert!((-slope / 1e10 - 1.0).abs() < 0.01, "fitted rate {}", -slope);
    }

    /// Steady-state photon number x = |β|² solves 4η²x³ + Γ̄²x − |γψ₀|² = 0;
    /// the left side is monotone in x, so bisection finds the unique root.
    fn steady_state_oracle(eta: f64, gamma_bar: f64, drive2: f64) -> f64 {
        let f = |x: f64| 4.0 * eta * eta * x.powi(3) + gamma_bar * gamma_bar * x - drive2;
        let (mut lo, mut hi) = (0.0, drive2 / (gamma_bar * gamma_bar));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn spm_steady_state_under_constant_drive() {
        let gamma_bar = 1e10;
        let eta = 2e8;
        let sys = system(gamma_bar, 0.2, eta);
        let psi0 = Complex64::new(3e4, 1e4);
        let grid = TimeGrid::new(0.0, 40.0 / gamma_bar, 20_000).unwrap();
        let tr = evolve_intracavity(&sys, |_| psi0, &grid, OdeOptions::default()).unwrap();
        let x = tr.states.last().unwrap().norm_sqr();
        let drive2 = sys.pump().gamma.norm_sqr() * psi0.norm_sqr();
        let expect = steady_state_oracle(eta, gamma_bar, drive2);
        // SPM matters at this drive strength.
        assert!(2.0 * eta * expect > 0.1 * gamma_bar);
        assert!((x - expect).abs() < 1e-8 * expect, "{x} vs {expect}");
    }

    #[test]
    fn spm_vanishes_in_weak_field_limit() {
        let sigma = 1e-10;
        let grid = TimeGrid::for_pulse(sigma, 1e10, 20.0, 2048).unwrap();
        let sgrid = SpectralGrid::new(1000.0, 65).unwrap();
        let lin = system(1e10, 0.0, 0.0);
        let spm = system(1e10, 0.0, 5e8);
        let mut previous = f64::INFINITY;
        for amp in [1e-2, 1e-3, 1e-4] {
            let spec = PumpSpec::gaussian(Complex64::new(amp, 0.0), sigma).unwrap();
            let a = pump_time_evolution(&lin, &spec, &grid, &sgrid).unwrap();
            let b = pump_time_evolution(&spm, &spec, &grid, &sgrid).unwrap();
            let peak = a.envelope.iter().map(|x| x.norm()).fold(0.0, f64::max);
            let diff = a.envelope.iter().zip(&b.envelope).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / peak;
            // The SPM correction is relative order η|β|²/Γ̄, so quadratic in amplitude.
            if previous.is_finite() {
                assert!(diff < previous / 50.0, "{diff} vs {previous}");
            }
            previous = diff;
        }
        assert!(previous < 1e-3);
    }

    #[test]
    fn tabulated_pump_matches_gaussian() {
        let sigma = 1e-10;
        let sys = system(1e10, 0.0, 0.0);
        let g = PumpSpec::gaussian(Complex64::new(1.0, 0.0), sigma).unwrap();
        let table_grid = SpectralGrid::new(16.0 / (V * sigma), 257).unwrap();
        let values = table_grid.points().iter().map(|&k| g.incoming_at(k, V)).collect();
        let t = PumpSpec::tabulated(Complex64::new(1.0, 0.0), table_grid, values).unwrap();
        let out = SpectralGrid::new(8.0 / (V * sigma), 101).unwrap();
        let a = incoming_spectrum(&g, &sys, &out).unwrap();
        let b = incoming_spectrum(&t, &sys, &out).unwrap();
        assert!(relative_l2(&b, &a) < 1e-9);
        assert!((t.mean_photon_number(V) - g.mean_photon_number(V)).abs() < 1e-9 * g.mean_photon_number(V));
    }

    #[test]
    fn tabulated_requires_decayed_edges() {
        let grid = SpectralGrid::new(10.0, 16).unwrap();
        let values = vec![Complex64::new(1.0, 0.0); 16];
        assert!(PumpSpec::tabulated(Complex64::new(1.0, 0.0), grid, values).is_err());
    }
}
