use nalgebra::Vector2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::drive::{DriveMatrix, C2};
use crate::error::{Error, Result};
use crate::numerics::TimeGrid;

/// G(t_m, t_n) for m ≥ n, stored as columns of fixed source time t_n.
#[derive(Clone, Debug)]
pub struct PropagatorTable {
    pub grid: TimeGrid,
    columns: Vec<Vec<C2>>,
    /// Richardson estimate max|G_h − G_{2h}|/15 over even source columns.
    pub error_estimate: Option<f64>,
}

impl PropagatorTable {
    /// G(t_m, t_n); `None` when m < n.
    pub fn get(&self, m: usize, n: usize) -> Option<&C2> {
        self.columns.get(n)?.get(m.checked_sub(n)?)
    }

    pub fn column(&self, n: usize) -> &[C2] {
        &self.columns[n]
    }
}

/// One RK4 step of dy/dt = M y using pump-grid samples at the start,
/// midpoint and end of the step.
#[inline]
fn rk4<T>(m0: &C2, mh: &C2, m1: &C2, h: f64, y: &T) -> T
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Mul<Complex64, Output = T>,
    for<'a> &'a C2: std::ops::Mul<&'a T, Output = T>,
{
    let hc = |x: f64| Complex64::new(x, 0.0);
    let k1 = m0 * y;
    let y2 = y.clone() + k1.clone() * hc(0.5 * h);
    let k2 = mh * &y2;
    let y3 = y.clone() + k2.clone() * hc(0.5 * h);
    let k3 = mh * &y3;
    let y4 = y.clone() + k3.clone() * hc(h);
    let k4 = m1 * &y4;
    y.clone() + (k1 + k2 * hc(2.0) + k3 * hc(2.0) + k4) * hc(h / 6.0)
}

fn march<T>(drive: &DriveMatrix, grid: &TimeGrid, stride: usize, n: usize, y0: T, norm: impl Fn(&T) -> f64) -> Result<Vec<T>>
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Mul<Complex64, Output = T>,
    for<'a> &'a C2: std::ops::Mul<&'a T, Output = T>,
{
    let h = grid.dt();
    let mut out = Vec::with_capacity(grid.len() - n);
    let mut y = y0;
    out.push(y.clone());
    for m in n..grid.n_steps() {
        let k = m * stride;
        y = rk4(drive.sample(k), drive.sample(k + stride / 2), drive.sample(k + stride), h, &y);
        if !norm(&y).is_finite() {
            return Err(Error::Divergence { time: grid.time(m + 1) });
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// G(·, t_n) from G(t_n, t_n) = 1 to the end of `grid`.
pub fn propagate_column(drive: &DriveMatrix, grid: &TimeGrid, n: usize) -> Result<Vec<C2>> {
    let stride = drive.stride_for(grid)?;
    march(drive, grid, stride, n, C2::identity(), |g| g.norm())
}

/// First column (G₁₁, G₂₁)(·, t_n), which is all the pair amplitude needs.
pub(crate) fn propagate_first_column(drive: &DriveMatrix, grid: &TimeGrid, stride: usize, n: usize) -> Result<Vec<Vector2<Complex64>>> {
    let e1 = Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    march(drive, grid, stride, n, e1, |g| g.norm())
}

/// Fills every column of G on `grid`. With `tol`, the even columns are
/// recomputed on the 2h grid and the Richardson estimate must meet `tol`.
pub fn solve_propagator(drive: &DriveMatrix, grid: &TimeGrid, tol: Option<f64>) -> Result<PropagatorTable> {
    drive.stride_for(grid)?;
    let columns: Vec<Vec<C2>> = (0..grid.len()).into_par_iter().map(|n| propagate_column(drive, grid, n)).collect::<Result<_>>()?;

    let mut error_estimate = None;
    if let Some(coarse) = grid.coarsened() {
        if drive.stride_for(&coarse).is_ok() {
            let est = (0..coarse.len())
                .into_par_iter()
                .map(|n| {
                    let c = propagate_column(drive, &coarse, n)?;
                    let fine = &columns[2 * n];
                    Ok(c.iter().enumerate().map(|(j, g)| (g - fine[2 * j]).norm()).fold(0.0, f64::max))
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max)
                / 15.0;
            error_estimate = Some(est);
        }
    }
    if let Some(tol) = tol {
        match error_estimate {
            Some(est) if est > tol => {
                return Err(Error::Accuracy {
                    context: "propagator step halving",
                    target: tol,
                    estimate: est,
                    best: 1.0,
                })
            }
            None => {
                return Err(Error::Accuracy {
                    context: "propagator step halving (grid cannot be halved)",
                    target: tol,
                    estimate: f64::INFINITY,
                    best: 1.0,
                })
            }
            _ => {}
        }
    }
    Ok(PropagatorTable {
        grid: *grid,
        columns,
        error_estimate,
    })
}
