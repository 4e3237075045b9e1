//! Pair amplitude S(κ,κ′) = ⟨c_S(κ) c_I(κ′)⟩ assembled from G.
//!
//! Vacuum enters every input, so of the four contractions of
//! c_S = a_S − (iγ_S/v_S) b̄_S with c_I = a_I − (iγ_I/v_I) b̄_I only two
//! survive: ⟨a_S a_I⟩ = 0 and ⟨b̄_S a_I⟩ = 0 because a_I annihilates the
//! vacuum on the right. The delta correlators collapse one time integral:
//!
//!   S(κ,κ′) = γ_Sγ_I/(2π) ∫dt′ X(κ′,t′) [e^{iκv_S t′} − 2Γ̄_S Y(κ,t′)]
//!   X(κ′,t′) = ∫_{t′} dt G₂₁*(t,t′) e^{iκ′v_I t}
//!   Y(κ,t′)  = ∫_{t′} dt G₁₁(t,t′) e^{iκv_S t}
//!
//! where the first term is ⟨a_S b̄_I⟩ and the second ⟨b̄_S b̄_I⟩, whose noise
//! weight |γ_S|²/v_S + |μ_S|²/u_S = 2Γ̄_S sums both signal inputs.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::drive::DriveMatrix;
use super::table::propagate_first_column;
use crate::error::{Error, Result};
use crate::model::RingSystem;
use crate::numerics::{gregory_weight, Grid2D, SpectralGrid, TimeGrid};

/// Conversion per lifetime above which results leave the weak-pump regime
/// where they can be checked against the perturbative solution.
pub const STRONG_PUMP_RATIO: f64 = 0.1;

#[derive(Clone, Copy, Debug)]
pub struct TimeDomainOptions {
    /// Allowed relative L² change of S between steps h and 2h.
    pub tol: f64,
    pub check_halving: bool,
}

impl Default for TimeDomainOptions {
    fn default() -> Self {
        TimeDomainOptions {
            tol: 1e-3,
            check_halving: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TimeDomainPairAmplitude {
    pub amplitude: Grid2D<Complex64>,
    pub diagnostics: PropagatorDiagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorDiagnostics {
    pub time_steps: usize,
    pub dt_s: f64,
    /// ‖S_h − S_2h‖/‖S_h‖.
    pub halving_rel_change: Option<f64>,
    pub peak_conversion_ratio: f64,
    /// Outside the weak-pump regime: no reference solution to compare with.
    pub strong_pump_unvalidated: bool,
}

fn phase_table(axis: &SpectralGrid, v: f64, grid: &TimeGrid) -> Vec<Complex64> {
    let ks = axis.points();
    let mut out = Vec::with_capacity(grid.len() * ks.len());
    for t in grid.times() {
        out.extend(ks.iter().map(|k| Complex64::from_polar(1.0, k * v * t)));
    }
    out
}

fn assemble(sys: &RingSystem, drive: &DriveMatrix, grid: &TimeGrid, axis_s: &SpectralGrid, axis_i: &SpectralGrid) -> Result<Grid2D<Complex64>> {
    let stride = drive.stride_for(grid)?;
    let (ns, ni) = (axis_s.len(), axis_i.len());
    let n_t = grid.len();
    let dt = grid.dt();
    let es = phase_table(axis_s, sys.signal().v, grid);
    let ei = phase_table(axis_i, sys.idler().v, grid);

    // Row n holds X(·, t_n) then Y(·, t_n).
    let xy: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..n_t)
        .into_par_iter()
        .map(|n| {
            let col = propagate_first_column(drive, grid, stride, n)?;
            let pts = col.len();
            let mut x = vec![Complex64::new(0.0, 0.0); ni];
            let mut y = vec![Complex64::new(0.0, 0.0); ns];
            for (j, g) in col.iter().enumerate() {
                let w = gregory_weight(j, pts) * dt;
                if w == 0.0 {
                    continue;
                }
                let m = n + j;
                let g21 = g[1].conj() * w;
                let g11 = g[0] * w;
                for (xv, e) in x.iter_mut().zip(&ei[m * ni..(m + 1) * ni]) {
                    *xv += g21 * e;
                }
                for (yv, e) in y.iter_mut().zip(&es[m * ns..(m + 1) * ns]) {
                    *yv += g11 * e;
                }
            }
            Ok((x, y))
        })
        .collect::<Result<_>>()?;

    let two_gamma = 2.0 * sys.signal().total_rate();
    let pref = sys.signal().gamma * sys.idler().gamma / (2.0 * PI);
    Ok(Grid2D::par_from_fn(*axis_s, *axis_i, |js, ji| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, (x, y)) in xy.iter().enumerate() {
            let w = gregory_weight(n, n_t) * dt;
            acc += x[ji] * (es[n * ns + js] - y[js] * two_gamma) * w;
        }
        acc * pref
    }))
}

fn relative_l2(a: &Grid2D<Complex64>, b: &Grid2D<Complex64>) -> Option<f64> {
    let den = b.sum_norm_sqr();
    if den == 0.0 {
        return None;
    }
    let num: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm_sqr()).sum();
    Some((num / den).sqrt())
}

/// Time-domain pair amplitude on `axis_s × axis_i`, with step-halving check.
/// `drive` must come from a pump solved on a grid that refines `grid` by an
/// even factor (four when the halving check is on).
pub fn pair_amplitude_time_domain(
    sys: &RingSystem,
    drive: &DriveMatrix,
    grid: &TimeGrid,
    axis_s: &SpectralGrid,
    axis_i: &SpectralGrid,
    opts: TimeDomainOptions,
) -> Result<TimeDomainPairAmplitude> {
    let amplitude = assemble(sys, drive, grid, axis_s, axis_i)?;
    if !amplitude.all_finite() {
        return Err(Error::NonFinite("time-domain pair amplitude"));
    }
    let mut halving_rel_change = None;
    if opts.check_halving {
        let coarse = grid.coarsened().ok_or(Error::Accuracy {
            context: "time-domain pair amplitude halving (odd step count)",
            target: opts.tol,
            estimate: f64::INFINITY,
            best: 0.0,
        })?;
        let s2 = assemble(sys, drive, &coarse, axis_s, axis_i)?;
        halving_rel_change = relative_l2(&s2, &amplitude);
        if let Some(change) = halving_rel_change {
            if change > opts.tol {
                return Err(Error::Accuracy {
                    context: "time-domain pair amplitude halving",
                    target: opts.tol,
                    estimate: change,
                    best: amplitude.sum_norm_sqr().sqrt(),
                });
            }
        }
    }
    let ratio = drive.peak_conversion_ratio();
    Ok(TimeDomainPairAmplitude {
        amplitude,
        diagnostics: PropagatorDiagnostics {
            time_steps: grid.n_steps(),
            dt_s: grid.dt(),
            halving_rel_change,
            peak_conversion_ratio: ratio,
            strong_pump_unvalidated: ratio > STRONG_PUMP_RATIO,
        },
    })
}
