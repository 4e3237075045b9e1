//! Green-function solution of the linearised signal/idler equations under a
//! classical pump, with SPM in the pump and XPM on signal and idler.

mod amplitude;
mod drive;
mod table;

pub use amplitude::{
    pair_amplitude_time_domain, PropagatorDiagnostics, TimeDomainOptions, TimeDomainPairAmplitude, STRONG_PUMP_RATIO,
};
pub use drive::{build_drive_matrix, DriveMatrix, C2};
pub use table::{propagate_column, solve_propagator, PropagatorTable};

use crate::error::Result;
use crate::model::RingSystem;
use crate::numerics::{SpectralGrid, TimeGrid};
use crate::pump::{pump_time_evolution, PumpField, PumpSpec};

/// Pump-grid refinement relative to the propagator step: midpoints of both
/// h and 2h steps then fall on pump samples.
pub const PUMP_REFINEMENT: usize = 4;

/// Solves the pump on `grid` refined by [`PUMP_REFINEMENT`].
pub fn pump_for_propagator(sys: &RingSystem, spec: &PumpSpec, grid: &TimeGrid, spectral: &SpectralGrid) -> Result<PumpField> {
    pump_time_evolution(sys, spec, &grid.refined(PUMP_REFINEMENT), spectral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModeParams;
    use crate::pump::IntracavityPump;
    use crate::sfwm::{pair_amplitude, pump_pair_function, response_kernels};
    use nalgebra::Matrix2;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const V: f64 = 1.5e8;
    const SIGMA: f64 = 1e-10;

    fn system(lambda: Complex64, zeta: f64, delta: f64) -> RingSystem {
        let p = ModeParams::from_rates(1.2e15, V, V, 1e10, 0.0).unwrap();
        let s = ModeParams::from_rates(1.2e15 + 2e12 + delta, V, V, 1e10, 4e9).unwrap();
        let i = ModeParams::from_rates(1.2e15 - 2e12, V, V, 7e9, 2e9).unwrap();
        RingSystem::new(p, s, i, lambda, 0.0, zeta).unwrap()
    }

    fn setup(sys: &RingSystem, amp: f64, n: usize) -> (TimeGrid, DriveMatrix) {
        let grid = TimeGrid::for_pulse(SIGMA, 9e9, 20.0, n).unwrap();
        let spec = PumpSpec::gaussian(Complex64::new(amp, 0.0), SIGMA).unwrap();
        let pump = pump_for_propagator(sys, &spec, &grid, &SpectralGrid::new(1000.0, 65).unwrap()).unwrap();
        (grid, build_drive_matrix(sys, &pump))
    }

    #[test]
    fn drive_matrix_structure() {
        let sys = system(Complex64::from_polar(2.0, 0.7), 3e8, 5e9);
        let (_, drive) = setup(&sys, 0.0, 64);
        let m = drive.at(0.0).unwrap();
        assert_eq!(m, Matrix2::new(Complex64::new(-1.4e10, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-9e9, 0.0)));

        let beta = Complex64::new(0.3, -0.8);
        let t = 1.7e-10;
        let m = drive.from_beta(t, beta);
        assert_eq!(m[(0, 0)].re, -1.4e10);
        assert_eq!(m[(1, 1)].re, -9e9);
        assert!((m[(0, 1)].norm() - 2.0 * beta.norm_sqr()).abs() < 1e-14);
        // det by hand: (a)(d) − (b)(c).
        let n = beta.norm_sqr();
        let a = Complex64::new(-1.4e10, -3e8 * n);
        let d = Complex64::new(-9e9, 3e8 * n);
        let lam = Complex64::from_polar(2.0, 0.7);
        let b = -Complex64::i() * lam * beta * beta * Complex64::from_polar(1.0, 5e9 * t);
        let c = Complex64::i() * lam.conj() * (beta * beta).conj() * Complex64::from_polar(1.0, -5e9 * t);
        assert!((m.determinant() - (a * d - b * c)).norm() < 1e-12 * (a * d).norm());
        assert!(drive.at(-1.0).is_err());
    }

    #[test]
    fn identity_on_the_diagonal() {
        let sys = system(Complex64::new(1e-2, 0.0), 1e-2, 0.0);
        let (grid, drive) = setup(&sys, 1e3, 128);
        let table = solve_propagator(&drive, &grid, None).unwrap();
        for n in 0..grid.len() {
            assert_eq!(*table.get(n, n).unwrap(), C2::identity());
        }
        assert!(table.get(3, 5).is_none());
    }

    #[test]
    fn damping_only_is_exponential() {
        for zeta in [0.0, 5e8] {
            let sys = system(Complex64::new(0.0, 0.0), zeta, 0.0);
            let (grid, drive) = setup(&sys, 0.3, 2000);
            let table = solve_propagator(&drive, &grid, Some(1e-7)).unwrap();
            for (m, n) in [(10, 0), (1500, 200), (2000, 1000), (2000, 0)] {
                let g = table.get(m, n).unwrap();
                let dt = grid.time(m) - grid.time(n);
                assert!((g[(0, 0)].norm() - (-1.4e10 * dt).exp()).abs() < 1e-7);
                assert!((g[(1, 1)].norm() - (-9e9 * dt).exp()).abs() < 1e-7);
                assert!(g[(0, 1)].norm() == 0.0 && g[(1, 0)].norm() == 0.0);
                if zeta == 0.0 {
                    assert!((g[(0, 0)] - (-1.4e10 * dt).exp()).norm() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn composition_of_flows() {
        let sys = system(Complex64::new(1.0, 0.0), 1e-3, 3e9);
        let (grid, drive) = setup(&sys, 1e3, 400);
        let table = solve_propagator(&drive, &grid, None).unwrap();
        let tol = table.error_estimate.unwrap().max(1e-14);
        assert!(drive.peak_conversion_ratio() > 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut idx = [rng.gen_range(0..=400), rng.gen_range(0..=400), rng.gen_range(0..=400)];
            idx.sort();
            let [a, b, c] = idx;
            let direct = table.get(c, a).unwrap();
            let composed = table.get(c, b).unwrap() * table.get(b, a).unwrap();
            assert!((direct - composed).norm() <= 10.0 * tol, "{a} {b} {c}");
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let sys = system(Complex64::new(0.0, 0.0), 0.0, 0.0);
        let grid = TimeGrid::new(0.0, 1e-9, 50).unwrap();
        let spec = PumpSpec::gaussian(Complex64::new(0.0, 0.0), SIGMA).unwrap();
        let fine = TimeGrid::new(0.0, 1e-9, 50 * 8).unwrap();
        let pump = pump_time_evolution(&sys, &spec, &fine, &SpectralGrid::new(1000.0, 65).unwrap()).unwrap();
        let drive = build_drive_matrix(&sys, &pump);
        let err = |g: &TimeGrid| {
            let col = propagate_column(&drive, g, 0).unwrap();
            (col.last().unwrap()[(0, 0)] - (-1.4e10 * 1e-9f64).exp()).norm()
        };
        let ratio = err(&grid) / err(&grid.refined(2));
        assert!((12.0..=20.0).contains(&ratio), "{ratio}");
    }

    fn perturbative(sys: &RingSystem, amp: f64, axis: &SpectralGrid) -> crate::numerics::Grid2D<Complex64> {
        let spec = PumpSpec::gaussian(Complex64::new(amp, 0.0), SIGMA).unwrap();
        let pump = IntracavityPump::filtered(sys, &spec);
        let f = pump_pair_function(&pump, sys, axis, axis, 1e-10).unwrap();
        pair_amplitude(&response_kernels(sys, &f))
    }

    fn time_domain(sys: &RingSystem, amp: f64, axis: &SpectralGrid, n: usize) -> TimeDomainPairAmplitude {
        let (grid, drive) = setup(sys, amp, n);
        pair_amplitude_time_domain(sys, &drive, &grid, axis, axis, TimeDomainOptions::default()).unwrap()
    }

    #[test]
    fn no_coupling_no_pairs() {
        let sys = system(Complex64::new(0.0, 0.0), 0.0, 0.0);
        let axis = SpectralGrid::new(300.0, 9).unwrap();
        let (grid, drive) = setup(&sys, 1.0, 256);
        let opts = TimeDomainOptions {
            check_halving: false,
            ..Default::default()
        };
        let s = pair_amplitude_time_domain(&sys, &drive, &grid, &axis, &axis, opts).unwrap();
        assert!(s.amplitude.values().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn agrees_with_perturbative_solution() {
        for delta in [0.0, 4e9] {
            let sys = system(Complex64::from_polar(1.0, 0.3), 0.0, delta);
            let axis = SpectralGrid::new(500.0, 33).unwrap();
            let td = time_domain(&sys, 1.0, &axis, 1024);
            let pt = perturbative(&sys, 1.0, &axis);
            let peak = pt.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
            let max_dev = td.amplitude.values().iter().zip(pt.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(max_dev < 1e-2 * peak, "Δ={delta}: {}", max_dev / peak);
            assert!(!td.diagnostics.strong_pump_unvalidated);
        }
    }

    #[test]
    fn coupling_phase_is_global() {
        let axis = SpectralGrid::new(400.0, 17).unwrap();
        let a = time_domain(&system(Complex64::new(1.0, 0.0), 0.0, 0.0), 1.0, &axis, 1024).amplitude;
        let phi = 1.1;
        let b = time_domain(&system(Complex64::from_polar(1.0, phi), 0.0, 0.0), 1.0, &axis, 1024).amplitude;
        let peak = a.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x.norm() - y.norm()).abs() <= 1e-6 * peak);
            assert!((x * Complex64::from_polar(1.0, phi) - y).norm() <= 1e-6 * peak);
        }
    }

    #[test]
    fn quadratic_in_pump_amplitude() {
        let sys = system(Complex64::new(1.0, 0.0), 0.0, 0.0);
        let axis = SpectralGrid::new(400.0, 17).unwrap();
        let a = time_domain(&sys, 1.0, &axis, 1024).amplitude;
        let b = time_domain(&sys, 0.5, &axis, 1024).amplitude;
        let peak = a.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x * 0.25 - y).norm() <= 1e-2 * 0.25 * peak);
        }
    }

    #[test]
    fn strong_pump_is_flagged() {
        let sys = system(Complex64::new(1.0, 0.0), 0.0, 0.0);
        let axis = SpectralGrid::new(400.0, 9).unwrap();
        let (grid, drive) = setup(&sys, 1e5, 256);
        let opts = TimeDomainOptions {
            check_halving: false,
            ..Default::default()
        };
        let s = pair_amplitude_time_domain(&sys, &drive, &grid, &axis, &axis, opts).unwrap();
        assert!(s.diagnostics.strong_pump_unvalidated);
    }
}
