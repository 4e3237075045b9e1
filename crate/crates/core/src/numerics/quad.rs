//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::Error;

/// Scalar types the integrator accepts.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 2000,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Default::default()
        }
    }
}

/// Non-convergence, carrying the best estimate reached.
#[derive(Clone, Copy, Debug)]
pub struct QuadError<T> {
    pub best: T,
    pub error_estimate: f64,
    pub target: f64,
}

impl<T: QuadValue> From<QuadError<T>> for Error {
    fn from(e: QuadError<T>) -> Self {
        Error::Accuracy {
            context: "quadrature",
            target: e.target,
            estimate: e.error_estimate,
            best: e.best.magnitude(),
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<T: QuadValue>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).magnitude())
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// ∫ₐᵇ f(x) dx. Succeeds once the summed Kronrod–Gauss error estimate is
/// below `max(rel_tol·|I|, abs_tol)`.
pub fn integrate_1d<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<T, QuadError<T>> {
    if a == b {
        return Ok(T::zero());
    }
    let (value, error) = kronrod15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;

    for _ in 0..opts.max_subdivisions {
        let target = (opts.rel_tol * total.magnitude()).max(opts.abs_tol);
        if total_err <= target || !total_err.is_finite() {
            break;
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            heap.push(worst);
            break;
        }
        let (lv, le) = kronrod15(&mut f, worst.a, mid);
        let (rv, re) = kronrod15(&mut f, mid, worst.b);
        total = total - worst.value + lv + rv;
        total_err = total_err - worst.error + le + re;
        heap.push(Segment { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Segment { a: mid, b: worst.b, value: rv, error: re });
    }

    // Re-sum to shed the drift of the running updates.
    let mut sum = T::zero();
    let mut err = 0.0;
    for s in heap.iter() {
        sum = sum + s.value;
        err += s.error;
    }
    let target = (opts.rel_tol * sum.magnitude()).max(opts.abs_tol);
    if err <= target && sum.magnitude().is_finite() {
        Ok(sum)
    } else {
        Err(QuadError {
            best: sum,
            error_estimate: err,
            target,
        })
    }
}

/// Weight of sample `j` in a 4th-order rule over `n_points` equally spaced
/// samples (unit spacing): Gregory end corrections 3/8, 7/6, 23/24 for six
/// or more points, Simpson variants for three to five, trapezoid for two.
pub fn gregory_weight(j: usize, n_points: usize) -> f64 {
    debug_assert!(j < n_points.max(1));
    match n_points {
        0 | 1 => 0.0,
        2 => 0.5,
        3 => [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0][j],
        4 => [3.0 / 8.0, 9.0 / 8.0, 9.0 / 8.0, 3.0 / 8.0][j],
        5 => [1.0, 4.0, 2.0, 4.0, 1.0][j] / 3.0,
        _ => match j.min(n_points - 1 - j) {
            0 => 3.0 / 8.0,
            1 => 7.0 / 6.0,
            2 => 23.0 / 24.0,
            _ => 1.0,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gregory_rule_is_exact_for_cubics() {
        for n in 3..40 {
            let h = 1.0 / (n - 1) as f64;
            let sum: f64 = (0..n).map(|j| gregory_weight(j, n) * (j as f64 * h).powi(3)).sum::<f64>() * h;
            assert!((sum - 0.25).abs() < 1e-13, "n={n}: {sum}");
        }
        assert_eq!(gregory_weight(0, 2) + gregory_weight(1, 2), 1.0);
    }

    #[test]
    fn gregory_rule_converges_at_fourth_order() {
        let err = |n: usize| {
            let h = 1.0 / (n - 1) as f64;
            let sum: f64 = (0..n).map(|j| gregory_weight(j, n) * (j as f64 * h).exp()).sum::<f64>() * h;
            (sum - (1f64.exp() - 1.0)).abs()
        };
        let ratio = err(41) / err(81);
        assert!(ratio > 14.0 && ratio < 18.0, "{ratio}");
    }

    #[test]
    fn linear() {
        let v = integrate_1d(|x| x, 0.0, 1.0, QuadOptions::default()).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn truncated_gaussian() {
        let v = integrate_1d(|x: f64| (-x * x).exp(), -8.0, 8.0, QuadOptions::rel(1e-12)).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn lorentzian_mass() {
        // ∫_{−40Γ}^{40Γ} (Γ/π)/(x²+Γ²) dx = (2/π)·atan(40).
        let g = 2e10;
        let v = integrate_1d(|x: f64| g / PI / (x * x + g * g), -40.0 * g, 40.0 * g, QuadOptions::rel(1e-12)).unwrap();
        let exact = 2.0 / PI * 40f64.atan();
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn complex_oscillatory() {
        // ∫₀^{2π} e^{ix}·x dx = −2πi.
        let v = integrate_1d(|x: f64| Complex64::from_polar(x, x), 0.0, 2.0 * PI, QuadOptions::rel(1e-12)).unwrap();
        assert!((v - Complex64::new(0.0, -2.0 * PI)).norm() < 1e-10);
    }

    #[test]
    fn non_convergence_carries_estimate() {
        let opts = QuadOptions {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_subdivisions: 3,
        };
        let err = integrate_1d(|x: f64| (1.0 / x).sin(), 1e-4, 1.0, opts).unwrap_err();
        assert!(err.best.is_finite());
        assert!(err.error_estimate > err.target);
        let e: Error = err.into();
        assert!(matches!(e, Error::Accuracy { .. }));
    }
}
