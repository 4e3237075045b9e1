//! Fixed-step classic Runge–Kutta with step-halving error estimates.

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::grid::TimeGrid;
use crate::error::{Error, Result};

/// State vector for [`ode_solve`]: anything supporting `y += a·x`.
pub trait OdeState: Clone {
    fn axpy(&mut self, a: f64, x: &Self);
    /// Largest component magnitude; non-finite when any component is.
    fn max_abs(&self) -> f64;
    fn max_abs_diff(&self, other: &Self) -> f64;
}

impl OdeState for f64 {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

impl OdeState for Complex64 {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += x * a;
    }
    fn max_abs(&self) -> f64 {
        self.norm()
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl OdeState for Matrix2<Complex64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (y, x) in self.iter_mut().zip(x.iter()) {
            *y += x * a;
        }
    }
    fn max_abs(&self) -> f64 {
        self.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.iter().zip(other.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl<S: OdeState> OdeState for Vec<S> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (y, x) in self.iter_mut().zip(x) {
            y.axpy(a, x);
        }
    }
    fn max_abs(&self) -> f64 {
        self.iter().map(OdeState::max_abs).fold(0.0, f64::max)
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.iter().zip(other).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max)
    }
}

/// One classic RK4 step of size `h` from `(t, y)`.
pub fn rk4_step<S: OdeState>(rhs: &mut impl FnMut(f64, &S) -> S, t: f64, h: f64, y: &S) -> S {
    let k1 = rhs(t, y);
    let mut y2 = y.clone();
    y2.axpy(0.5 * h, &k1);
    let k2 = rhs(t + 0.5 * h, &y2);
    let mut y3 = y.clone();
    y3.axpy(0.5 * h, &k2);
    let k3 = rhs(t + 0.5 * h, &y3);
    let mut y4 = y.clone();
    y4.axpy(h, &k3);
    let k4 = rhs(t + h, &y4);
    let mut out = y.clone();
    out.axpy(h / 6.0, &k1);
    out.axpy(h / 3.0, &k2);
    out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4);
    out
}

#[derive(Clone, Copy, Debug)]
#[derive(Default)]
pub struct OdeOptions {
    /// Absolute error target for the step-halving estimate. `None` skips
    /// the comparison run entirely.
    pub tol: Option<f64>,
    /// Maximum number of times the substep count may be doubled to reach `tol`.
    pub max_refinements: u32,
    /// Return an accuracy error when `tol` is still missed after refinement.
    pub strict: bool,
}


impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions {
            tol: Some(tol),
            max_refinements: 4,
            strict: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub grid: TimeGrid,
    pub states: Vec<S>,
    /// RK4 substeps taken per grid interval.
    pub substeps: usize,
    /// max |y_h − y_{h/2}| over the grid, when estimated.
    pub error_estimate: Option<f64>,
}

fn integrate<S: OdeState>(rhs: &mut impl FnMut(f64, &S) -> S, grid: &TimeGrid, y0: &S, substeps: usize) -> Result<Vec<S>> {
    let h = grid.dt() / substeps as f64;
    let mut states = Vec::with_capacity(grid.len());
    let mut y = y0.clone();
    states.push(y.clone());
    for k in 0..grid.n_steps() {
        let tk = grid.time(k);
        for j in 0..substeps {
            y = rk4_step(rhs, tk + j as f64 * h, h, &y);
        }
        if !y.max_abs().is_finite() {
            return Err(Error::Divergence { time: grid.time(k + 1) });
        }
        states.push(y.clone());
    }
    Ok(states)
}

/// Integrates `dy/dt = rhs(t, y)` across `grid`, returning the state at
/// every grid point.
pub fn ode_solve<S: OdeState>(
    mut rhs: impl FnMut(f64, &S) -> S,
    grid: &TimeGrid,
    y0: S,
    opts: OdeOptions,
) -> Result<Trajectory<S>> {
    let mut substeps = 1;
    let mut states = integrate(&mut rhs, grid, &y0, substeps)?;
    let Some(tol) = opts.tol else {
        return Ok(Trajectory {
            grid: *grid,
            states,
            substeps,
            error_estimate: None,
        });
    };
    let mut refinements = 0;
    loop {
        let fine = integrate(&mut rhs, grid, &y0, 2 * substeps)?;
        let estimate = states.iter().zip(&fine).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max);
        if estimate <= tol || refinements >= opts.max_refinements {
            if estimate > tol && opts.strict {
                return Err(Error::Accuracy {
                    context: "ode",
                    target: tol,
                    estimate,
                    best: fine.last().map(OdeState::max_abs).unwrap_or(0.0),
                });
            }
            return Ok(Trajectory {
                grid: *grid,
                states,
                substeps,
                error_estimate: Some(estimate),
            });
        }
        substeps *= 2;
        refinements += 1;
        states = fine;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let grid = TimeGrid::new(0.0, 1.0, 1000).unwrap();
        let tr = ode_solve(|_, y: &f64| -y, &grid, 1.0, OdeOptions::default()).unwrap();
        assert!((tr.states.last().unwrap() - (-1f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn phase_rotation_is_unitary() {
        let omega = 3.0;
        let grid = TimeGrid::new(0.0, 10.0, 4000).unwrap();
        let tr = ode_solve(
            |_, y: &Complex64| Complex64::new(0.0, omega) * y,
            &grid,
            Complex64::new(1.0, 0.0),
            OdeOptions::default(),
        )
        .unwrap();
        for y in &tr.states {
            assert!((y.norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn constant_matrix_matches_eigendecomposition() {
        // A = [[-1, 2], [0.5, -3]]: real distinct eigenvalues, so
        // exp(At) = V·diag(e^{λt})·V⁻¹ gives an independent reference.
        let a = Matrix2::new(-1.0, 2.0, 0.5, -3.0);
        let tr_a: f64 = a.trace();
        let det = a.determinant();
        let disc = (tr_a * tr_a / 4.0 - det).sqrt();
        let (l1, l2) = (tr_a / 2.0 + disc, tr_a / 2.0 - disc);
        let v = Matrix2::new(2.0, 2.0, l1 + 1.0, l2 + 1.0);
        let t = 2.0;
        let exact = v * Matrix2::new((l1 * t).exp(), 0.0, 0.0, (l2 * t).exp()) * v.try_inverse().unwrap();

        let ac = a.map(|x| Complex64::new(x, 0.0));
        let grid = TimeGrid::new(0.0, t, 2000).unwrap();
        let tr = ode_solve(|_, y: &Matrix2<Complex64>| ac * y, &grid, Matrix2::identity(), OdeOptions::default()).unwrap();
        let got = tr.states.last().unwrap();
        for (g, e) in got.iter().zip(exact.iter()) {
            assert!((g - e).norm() < 1e-7, "{g} vs {e}");
        }
    }

    #[test]
    fn step_halving_estimate_and_refinement() {
        let grid = TimeGrid::new(0.0, 5.0, 40).unwrap();
        let tr = ode_solve(|_, y: &f64| -2.0 * y, &grid, 1.0, OdeOptions::with_tol(1e-8)).unwrap();
        assert!(tr.substeps > 1);
        let err = (tr.states.last().unwrap() - (-10f64).exp()).abs();
        assert!(err < 1e-8);
        assert!(tr.error_estimate.unwrap() <= 1e-8);
    }

    #[test]
    fn strict_tolerance_failure() {
        let grid = TimeGrid::new(0.0, 5.0, 4).unwrap();
        let opts = OdeOptions {
            tol: Some(1e-14),
            max_refinements: 1,
            strict: true,
        };
        let err = ode_solve(|_, y: &f64| -3.0 * y, &grid, 1.0, opts).unwrap_err();
        assert!(matches!(err, Error::Accuracy { context: "ode", .. }));
    }

    #[test]
    fn divergence_reports_time() {
        let grid = TimeGrid::new(0.0, 1.0, 100).unwrap();
        let err = ode_solve(|_, y: &f64| y * y * 1e6, &grid, 1.0, OdeOptions::default()).unwrap_err();
        match err {
            Error::Divergence { time } => assert!(time > 0.0 && time <= 1.0),
            e => panic!("unexpected {e}"),
        }
    }
}
