//! Joint spectral intensity, pair and singles probabilities, Schmidt
//! decomposition and shape moments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{singles_ratio_closed_form, Port, RingSystem};
use crate::numerics::{svd_kernel, Grid2D, SpectralGrid};
use crate::sfwm::{port_pair_amplitude, PumpPairFunction, ResponseKernels};

/// Φ(κ,κ′) = |λ|²|γ_S|²|γ_I|²|F_S|² / (((κv_S)² + Γ̄_S²)((κ′v_I)² + Γ̄_I²)).
#[derive(Clone, Debug)]
pub struct Jsi {
    pub raw: Grid2D<f64>,
    /// Peak scaled to one (all zero if Φ vanishes).
    pub normalized: Grid2D<f64>,
}

pub fn jsi_closed_form(sys: &RingSystem, f: &PumpPairFunction) -> Jsi {
    let (sig, idl) = (sys.signal(), sys.idler());
    let pref = sys.lambda().norm_sqr() * sig.gamma.norm_sqr() * idl.gamma.norm_sqr();
    let (gs, gi) = (sig.total_rate(), idl.total_rate());
    let ls: Vec<f64> = f.axis_s().points().iter().map(|k| (k * sig.v).powi(2) + gs * gs).collect();
    let li: Vec<f64> = f.axis_i().points().iter().map(|k| (k * idl.v).powi(2) + gi * gi).collect();
    let raw = Grid2D::from_fn(*f.axis_s(), *f.axis_i(), |js, ji| pref * f.values.get(js, ji).norm_sqr() / (ls[js] * li[ji]));
    let normalized = raw.normalized();
    Jsi { raw, normalized }
}

#[derive(Clone, Copy, Debug)]
pub struct ObservableOptions {
    /// Allowed relative deviation of numeric r from the closed form.
    pub r_tol: f64,
    /// Allowed relative change of P_coincidences under grid halving.
    pub resolution_tol: f64,
    /// Minimum samples per Lorentzian half-width Γ̄/v.
    pub min_points_per_width: f64,
}

impl Default for ObservableOptions {
    fn default() -> Self {
        ObservableOptions {
            r_tol: 5e-3,
            resolution_tol: 1e-3,
            min_points_per_width: 8.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairObservables {
    /// ∬|S_cc|² dκdκ′ over the grid, arbitrary units.
    pub p_coincidences: f64,
    /// ∬(|S_cg|² + |S_gc|²) dκdκ′ over the grid, arbitrary units.
    pub p_singles: f64,
    /// P_singles/P_coincidences; `None` when no pairs reach the bus.
    pub r: Option<f64>,
    pub r_formula: Option<f64>,
    pub r_rel_dev: Option<f64>,
    pub schmidt_k: Option<f64>,
    pub purity: Option<f64>,
    /// Marginal FWHM of Φ along each axis, rad/m.
    pub fwhm_signal: Option<f64>,
    pub fwhm_idler: Option<f64>,
    /// |P(h) − P(2h)|/P(h) from the halving-grid check.
    pub resolution_rel_change: Option<f64>,
}

/// 2D trapezoid weights over indices `0..=last` with stride `stride`.
fn trapezoid(g: &Grid2D<f64>, last_s: usize, last_i: usize, stride: usize) -> f64 {
    let w = |j: usize, last: usize| if j == 0 || j == last { 0.5 } else { 1.0 };
    let mut acc = 0.0;
    for js in (0..=last_s).step_by(stride) {
        for ji in (0..=last_i).step_by(stride) {
            acc += w(js, last_s) * w(ji, last_i) * g.get(js, ji);
        }
    }
    acc * g.cell_area() * (stride * stride) as f64
}

pub fn integrate_grid(g: &Grid2D<f64>) -> f64 {
    let (ns, ni) = g.shape();
    trapezoid(g, ns - 1, ni - 1, 1)
}

/// Step h against 2h on the largest even-index sub-box.
fn halving_change(g: &Grid2D<f64>) -> Option<f64> {
    let (ns, ni) = g.shape();
    let (ls, li) = ((ns - 1) & !1, (ni - 1) & !1);
    let fine = trapezoid(g, ls, li, 1);
    if fine <= 0.0 {
        return None;
    }
    Some((fine - trapezoid(g, ls, li, 2)).abs() / fine)
}

fn marginal_fwhm(values: &[f64], axis: &SpectralGrid) -> Option<f64> {
    let (peak_at, &peak) = values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if !(peak > 0.0) {
        return None;
    }
    let half = 0.5 * peak;
    let crossing = |a: usize, b: usize| {
        let (fa, fb) = (values[a], values[b]);
        axis.point(a) + (half - fa) / (fb - fa) * (axis.point(b) - axis.point(a))
    };
    let left = (1..=peak_at).rev().find(|&j| values[j - 1] < half).map(|j| crossing(j - 1, j))?;
    let right = (peak_at..values.len() - 1).find(|&j| values[j + 1] < half).map(|j| crossing(j, j + 1))?;
    Some(right - left)
}

/// Marginal FWHMs (signal, idler) of a non-negative grid, rad/m.
pub fn marginal_fwhms(phi: &Grid2D<f64>) -> (Option<f64>, Option<f64>) {
    let (ns, ni) = phi.shape();
    let ms: Vec<f64> = (0..ns).map(|js| phi.row(js).iter().sum()).collect();
    let mi: Vec<f64> = (0..ni).map(|ji| (0..ns).map(|js| phi.get(js, ji)).sum()).collect();
    (marginal_fwhm(&ms, &phi.axis_s), marginal_fwhm(&mi, &phi.axis_i))
}

/// Samples per Lorentzian half-width Γ̄/v on the (signal, idler) axes.
pub fn points_per_width(sys: &RingSystem, axis_s: &SpectralGrid, axis_i: &SpectralGrid) -> (f64, f64) {
    let per = |axis: &SpectralGrid, mode: &crate::model::ModeParams| mode.total_rate() / mode.v / axis.step();
    (per(axis_s, sys.signal()), per(axis_i, sys.idler()))
}

/// Every observable with its diagnostics, without enforcing tolerances.
pub fn observables_unchecked(kernels: &ResponseKernels, sys: &RingSystem) -> PairObservables {
    let s = port_pair_amplitude(kernels, Port::Channel, Port::Channel);
    let phi = s.norm_sqr();
    let p_coincidences = integrate_grid(&phi);
    let p_singles = integrate_grid(&port_pair_amplitude(kernels, Port::Channel, Port::Phantom).norm_sqr())
        + integrate_grid(&port_pair_amplitude(kernels, Port::Phantom, Port::Channel).norm_sqr());

    let r_formula = singles_ratio_closed_form(&sys.derive_rates());
    let r = (p_coincidences > 0.0).then(|| p_singles / p_coincidences);
    let r_rel_dev = match (r, r_formula) {
        (Some(r), Some(rf)) if rf > 0.0 => Some((r - rf).abs() / rf),
        (Some(r), Some(_)) => Some(r.abs()),
        _ => None,
    };
    let summary = amplitude_summary(&s);
    PairObservables {
        p_coincidences,
        p_singles,
        r,
        r_formula,
        r_rel_dev,
        schmidt_k: summary.schmidt_k,
        purity: summary.purity,
        fwhm_signal: summary.fwhm_signal,
        fwhm_idler: summary.fwhm_idler,
        resolution_rel_change: summary.resolution_rel_change,
    }
}

pub fn observables(kernels: &ResponseKernels, sys: &RingSystem, opts: ObservableOptions) -> Result<PairObservables> {
    let (ps, pi) = points_per_width(sys, &kernels.axis_s, &kernels.axis_i);
    let available = ps.min(pi);
    if available < opts.min_points_per_width {
        return Err(Error::Coverage {
            what: "spectral samples per ring linewidth",
            needed: opts.min_points_per_width,
            available,
        });
    }
    let obs = observables_unchecked(kernels, sys);
    if let Some(dev) = obs.r_rel_dev {
        if dev > opts.r_tol {
            return Err(Error::Accuracy {
                context: "singles ratio vs closed form",
                target: opts.r_tol,
                estimate: dev,
                best: obs.r.unwrap_or(f64::NAN),
            });
        }
    }
    if let Some(change) = obs.resolution_rel_change {
        if change > opts.resolution_tol {
            return Err(Error::Accuracy {
                context: "pair probability under grid halving",
                target: opts.resolution_tol,
                estimate: change,
                best: obs.p_coincidences,
            });
        }
    }
    Ok(obs)
}

/// Observables that need only the channel-channel pair amplitude, as
/// produced by the time-domain path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSummary {
    /// ∬|S|² dκdκ′ over the grid, arbitrary units.
    pub p_coincidences: f64,
    pub schmidt_k: Option<f64>,
    pub purity: Option<f64>,
    pub fwhm_signal: Option<f64>,
    pub fwhm_idler: Option<f64>,
    pub resolution_rel_change: Option<f64>,
}

pub fn amplitude_summary(s: &Grid2D<Complex64>) -> AmplitudeSummary {
    let phi = s.norm_sqr();
    let schmidt = schmidt_analysis(s).ok();
    let (fwhm_signal, fwhm_idler) = marginal_fwhms(&phi);
    AmplitudeSummary {
        p_coincidences: integrate_grid(&phi),
        schmidt_k: schmidt.as_ref().map(|x| x.k),
        purity: schmidt.as_ref().map(|x| x.purity),
        fwhm_signal,
        fwhm_idler,
        resolution_rel_change: halving_change(&phi),
    }
}

#[derive(Clone, Debug)]
pub struct SchmidtAnalysis {
    /// Schmidt number K = 1/Σλ_n², λ_n = σ_n²/Σσ².
    pub k: f64,
    pub purity: f64,
    /// Normalised Schmidt weights λ_n, descending.
    pub weights: Vec<f64>,
    /// Leading signal/idler modes (up to four), sampled on the grid axes.
    pub signal_modes: Vec<Vec<Complex64>>,
    pub idler_modes: Vec<Vec<Complex64>>,
}

pub fn schmidt_analysis(s: &Grid2D<Complex64>) -> Result<SchmidtAnalysis> {
    if !s.all_finite() {
        return Err(Error::NonFinite("pair amplitude"));
    }
    let norm = s.sum_norm_sqr();
    if !(norm > 0.0) {
        return Err(Error::Undefined("Schmidt decomposition of a zero pair amplitude"));
    }
    let svd = svd_kernel(&s.scale(Complex64::new(1.0 / norm.sqrt(), 0.0)))?;
    let total: f64 = svd.singular_values.iter().map(|x| x * x).sum();
    let weights: Vec<f64> = svd.singular_values.iter().map(|x| x * x / total).collect();
    let k = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
    let keep = weights.len().min(4);
    Ok(SchmidtAnalysis {
        k,
        purity: 1.0 / k,
        weights,
        signal_modes: svd.left.into_iter().take(keep).collect(),
        idler_modes: svd.right.into_iter().take(keep).collect(),
    })
}

/// Second moments of a JSI in the angular-detuning plane x = κv_S, y = κ′v_I.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsiMoments {
    /// Variance along (x + y)/√2, (rad/s)².
    pub diagonal: f64,
    /// Variance along (x − y)/√2, (rad/s)².
    pub antidiagonal: f64,
}

impl JsiMoments {
    pub fn elongation(&self) -> f64 {
        self.antidiagonal / self.diagonal
    }
}

pub fn jsi_moments(phi: &Grid2D<f64>, v_s: f64, v_i: f64) -> Result<JsiMoments> {
    let total = phi.sum();
    if !(total > 0.0) {
        return Err(Error::Undefined("moments of a zero JSI"));
    }
    let xs: Vec<f64> = phi.axis_s.points().iter().map(|k| k * v_s).collect();
    let ys: Vec<f64> = phi.axis_i.points().iter().map(|k| k * v_i).collect();
    // Weighted sums of f(d, a) over rotated coordinates d = (x+y)/√2, a = (x−y)/√2.
    let weighted = |f: &dyn Fn(f64, f64) -> (f64, f64)| {
        let mut acc = (0.0, 0.0);
        for (js, x) in xs.iter().enumerate() {
            for (ji, y) in ys.iter().enumerate() {
                let w = phi.get(js, ji) / total;
                let (p, q) = f((x + y) / 2f64.sqrt(), (x - y) / 2f64.sqrt());
                acc.0 += w * p;
                acc.1 += w * q;
            }
        }
        acc
    };
    let mean = weighted(&|d, a| (d, a));
    let var = weighted(&|d, a| ((d - mean.0).powi(2), (a - mean.1).powi(2)));
    Ok(JsiMoments {
        diagonal: var.0,
        antidiagonal: var.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModeParams;
    use crate::pump::{IntracavityPump, PumpSpec};
    use crate::sfwm::{pump_pair_function, response_kernels};

    const V: f64 = 1.5e8;

    fn run(channel: [f64; 2], loss: [f64; 2], amplitude: f64, sigma: f64, n: usize) -> Result<PairObservables> {
        let p = ModeParams::from_rates(1.2e15, V, V, 1e10, 0.0).unwrap();
        let s = ModeParams::from_rates(1.2e15, V, V, channel[0], loss[0]).unwrap();
        let i = ModeParams::from_rates(1.2e15, V, V, channel[1], loss[1]).unwrap();
        let sys = RingSystem::new(p, s, i, Complex64::new(1.0, 0.0), 0.0, 0.0).unwrap();
        let spec = PumpSpec::gaussian(Complex64::new(amplitude, 0.0), sigma).unwrap();
        let pump = IntracavityPump::filtered(&sys, &spec);
        let widest = s.total_rate().max(i.total_rate()) / V;
        let g = SpectralGrid::new(6.0 * widest, n).unwrap();
        let f = pump_pair_function(&pump, &sys, &g, &g, 1e-10)?;
        observables(&response_kernels(&sys, &f), &sys, ObservableOptions::default())
    }

    #[test]
    fn lossless_has_no_singles() {
        let o = run([1e10, 1e10], [0.0, 0.0], 1.0, 1e-10, 129).unwrap();
        assert_eq!(o.p_singles, 0.0);
        assert_eq!(o.r, Some(0.0));
        assert_eq!(o.r_formula, Some(0.0));
    }

    #[test]
    fn critical_coupling_ratio_is_two() {
        let o = run([1e10, 1e10], [1e10, 1e10], 1.0, 1e-10, 129).unwrap();
        assert!((o.r.unwrap() - 2.0).abs() < 5e-3 * 2.0);
        assert_eq!(o.r_formula, Some(2.0));
    }

    #[test]
    fn unequal_rates_ratio() {
        let o = run([2e9, 3e9], [1e9, 6e9], 1.0, 1e-10, 401).unwrap();
        assert!((o.r.unwrap() - 2.5).abs() < 5e-3 * 2.5);
    }

    #[test]
    fn zero_pump_leaves_r_undefined() {
        let o = run([1e10, 1e10], [1e10, 1e10], 0.0, 1e-10, 129).unwrap();
        assert_eq!(o.p_coincidences, 0.0);
        assert_eq!(o.r, None);
        assert_eq!(o.r_formula, Some(2.0));
        assert_eq!(o.schmidt_k, None);
    }

    #[test]
    fn coarse_grid_rejected() {
        assert!(matches!(run([1e10, 1e10], [0.0, 0.0], 1.0, 1e-10, 33), Err(Error::Coverage { .. })));
    }

    #[test]
    fn schmidt_of_separable_and_two_mode_kernels() {
        let g = SpectralGrid::new(1.0, 16).unwrap();
        let sep = Grid2D::from_fn(g, g, |a, b| Complex64::new((a as f64 - 7.0).cos(), 0.0) * (1.0 + b as f64));
        assert!((schmidt_analysis(&sep).unwrap().k - 1.0).abs() < 1e-10);
        let two = Grid2D::from_fn(g, g, |a, b| Complex64::new(if a == b && a < 2 { 1.0 } else { 0.0 }, 0.0));
        let x = schmidt_analysis(&two).unwrap();
        assert!((x.k - 2.0).abs() < 1e-12);
        assert!((x.purity - 0.5).abs() < 1e-12);
        let zero = Grid2D::from_fn(g, g, |_, _| Complex64::new(0.0, 0.0));
        assert!(matches!(schmidt_analysis(&zero), Err(Error::Undefined(_))));
    }

    #[test]
    fn fwhm_of_lorentzian_marginal() {
        let g = SpectralGrid::new(50.0, 2001).unwrap();
        let one = SpectralGrid::new(1.0, 8).unwrap();
        let phi = Grid2D::from_fn(g, one, |js, _| 1.0 / (g.point(js).powi(2) + 4.0));
        let (fs, _) = marginal_fwhms(&phi);
        assert!((fs.unwrap() - 4.0).abs() < 1e-3);
    }

    #[test]
    fn moments_of_tilted_gaussian() {
        let g = SpectralGrid::new(30.0, 241).unwrap();
        // Variance 1 along the diagonal, 9 along the antidiagonal.
        let phi = Grid2D::from_fn(g, g, |a, b| {
            let (x, y) = (g.point(a), g.point(b));
            let d = (x + y) / 2f64.sqrt();
            let t = (x - y) / 2f64.sqrt();
            (-d * d / 2.0 - t * t / 18.0).exp()
        });
        let m = jsi_moments(&phi, 1.0, 1.0).unwrap();
        assert!((m.diagonal - 1.0).abs() < 1e-6);
        assert!((m.antidiagonal - 9.0).abs() < 1e-6);
        assert!((m.elongation() - 9.0).abs() < 1e-5);
    }
}
