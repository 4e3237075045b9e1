use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Plain uniform sampling axis: `start + k·step` for `k in 0..len`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformAxis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformAxis {
    pub fn new(start: f64, step: f64, len: usize) -> Self {
        UniformAxis { start, step, len }
    }

    /// Axis with `len` points symmetric about zero.
    pub fn centered(step: f64, len: usize) -> Self {
        UniformAxis {
            start: -0.5 * (len as f64 - 1.0) * step,
            step,
            len,
        }
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |k| self.point(k))
    }

    pub fn end(&self) -> f64 {
        self.point(self.len.saturating_sub(1))
    }
}

/// Uniform wavevector-offset axis symmetric about zero, rad/m.
///
/// Points are `−half_width, …, +half_width` inclusive; an odd `n_points`
/// places a sample exactly at κ = 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    center: f64,
    half_width: f64,
    n_points: usize,
}

impl SpectralGrid {
    pub const MIN_POINTS: usize = 8;

    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::invalid("half_width", format!("must be positive and finite, got {half_width}")));
        }
        if n_points < Self::MIN_POINTS {
            return Err(Error::invalid("n_points", format!("need at least {} points, got {n_points}", Self::MIN_POINTS)));
        }
        Ok(SpectralGrid {
            center: 0.0,
            half_width,
            n_points,
        })
    }

    pub fn center(&self) -> f64 {
        self.center
    }
    pub fn half_width(&self) -> f64 {
        self.half_width
    }
    pub fn len(&self) -> usize {
        self.n_points
    }
    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.n_points as f64 - 1.0)
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        self.center - self.half_width + k as f64 * self.step()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.point(k)).collect()
    }

    pub fn axis(&self) -> UniformAxis {
        UniformAxis::new(self.point(0), self.step(), self.n_points)
    }

    /// Every other point, same span. Used for halving-grid checks.
    pub fn coarsened(&self) -> Option<SpectralGrid> {
        if self.n_points.is_multiple_of(2) {
            return None;
        }
        SpectralGrid::new(self.half_width, self.n_points / 2 + 1).ok()
    }

    /// Index of the sample nearest to `kappa`, if inside the grid.
    pub fn nearest(&self, kappa: f64) -> Option<usize> {
        let x = (kappa - self.point(0)) / self.step();
        let k = x.round();
        (k >= 0.0 && (k as usize) < self.n_points).then_some(k as usize)
    }
}

/// Uniform time grid with `n_steps` intervals between `t0` and `t1`, s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t0: f64,
    t1: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, n_steps: usize) -> Result<Self> {
        if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::invalid("t1", format!("need finite t1 > t0, got [{t0}, {t1}]")));
        }
        if n_steps < 2 {
            return Err(Error::invalid("n_steps", format!("need at least 2 steps, got {n_steps}")));
        }
        Ok(TimeGrid { t0, t1, n_steps })
    }

    /// Grid for a pulse of duration `sigma` peaked at t = 0, starting six
    /// durations early and running `tail_lifetimes` damping times past the
    /// trailing edge of the pulse.
    pub fn for_pulse(sigma: f64, slowest_rate: f64, tail_lifetimes: f64, n_steps: usize) -> Result<Self> {
        let t0 = -6.0 * sigma;
        let t1 = 6.0 * sigma + tail_lifetimes / slowest_rate;
        TimeGrid::new(t0, t1, n_steps)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }
    pub fn t1(&self) -> f64 {
        self.t1
    }
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.n_steps as f64
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.t1
        } else {
            self.t0 + k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    pub fn axis(&self) -> UniformAxis {
        UniformAxis::new(self.t0, self.dt(), self.len())
    }

    pub fn refined(&self, factor: usize) -> TimeGrid {
        TimeGrid {
            n_steps: self.n_steps * factor,
            ..*self
        }
    }

    /// Same span with half as many steps, when the step count is even.
    pub fn coarsened(&self) -> Option<TimeGrid> {
        (self.n_steps.is_multiple_of(2) && self.n_steps >= 4).then_some(TimeGrid {
            n_steps: self.n_steps / 2,
            ..*self
        })
    }

    pub fn contains(&self, t: f64) -> bool {
        let slack = 1e-9 * self.dt();
        t >= self.t0 - slack && t <= self.t1 + slack
    }
}

/// Values sampled on a signal × idler wavevector grid, row-major with
/// the signal index running slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2D<T> {
    pub axis_s: SpectralGrid,
    pub axis_i: SpectralGrid,
    values: Vec<T>,
}

impl<T: Copy> Grid2D<T> {
    pub fn from_values(axis_s: SpectralGrid, axis_i: SpectralGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != axis_s.len() * axis_i.len() {
            return Err(Error::Shape(format!(
                "{} values for a {}×{} grid",
                values.len(),
                axis_s.len(),
                axis_i.len()
            )));
        }
        Ok(Grid2D { axis_s, axis_i, values })
    }

    pub fn from_fn(axis_s: SpectralGrid, axis_i: SpectralGrid, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity(axis_s.len() * axis_i.len());
        for js in 0..axis_s.len() {
            for ji in 0..axis_i.len() {
                values.push(f(js, ji));
            }
        }
        Grid2D { axis_s, axis_i, values }
    }

    /// Row-parallel fill; `f` must be pure.
    pub fn par_from_fn(axis_s: SpectralGrid, axis_i: SpectralGrid, f: impl Fn(usize, usize) -> T + Sync) -> Self
    where
        T: Send,
    {
        use rayon::prelude::*;
        let ni = axis_i.len();
        let values = (0..axis_s.len() * ni).into_par_iter().map(|k| f(k / ni, k % ni)).collect();
        Grid2D { axis_s, axis_i, values }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axis_s.len(), self.axis_i.len())
    }

    #[inline]
    pub fn get(&self, js: usize, ji: usize) -> T {
        self.values[js * self.axis_i.len() + ji]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn row(&self, js: usize) -> &[T] {
        let n = self.axis_i.len();
        &self.values[js * n..(js + 1) * n]
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Grid2D<U> {
        Grid2D {
            axis_s: self.axis_s,
            axis_i: self.axis_i,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn same_axes<U>(&self, other: &Grid2D<U>) -> bool {
        self.axis_s == other.axis_s && self.axis_i == other.axis_i
    }

    /// Every other sample along both axes.
    pub fn coarsened(&self) -> Option<Grid2D<T>> {
        let (ax_s, ax_i) = (self.axis_s.coarsened()?, self.axis_i.coarsened()?);
        Some(Grid2D::from_fn(ax_s, ax_i, |js, ji| self.get(2 * js, 2 * ji)))
    }

    /// Area element Δκ_s·Δκ_i.
    pub fn cell_area(&self) -> f64 {
        self.axis_s.step() * self.axis_i.step()
    }
}

impl Grid2D<f64> {
    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// (signal index, idler index) of the largest sample.
    pub fn argmax(&self) -> (usize, usize) {
        let n = self.axis_i.len();
        let k = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, &v)| if v > best.1 { (k, v) } else { best })
            .0;
        (k / n, k % n)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Copy scaled so the peak equals one; all-zero grids stay zero.
    pub fn normalized(&self) -> Grid2D<f64> {
        let peak = self.max();
        if peak > 0.0 {
            self.map(|v| v / peak)
        } else {
            self.clone()
        }
    }
}

impl Grid2D<Complex64> {
    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn norm_sqr(&self) -> Grid2D<f64> {
        self.map(|v| v.norm_sqr())
    }

    /// Σ|v|² over samples.
    pub fn sum_norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn scale(&self, c: Complex64) -> Grid2D<Complex64> {
        self.map(|v| v * c)
    }
}
