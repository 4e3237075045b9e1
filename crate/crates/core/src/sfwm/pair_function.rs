//! Pump-pair function F_S(κ,κ′): the amplitude for two pump photons to
//! convert into a signal at κ and an idler at κ′.
//!
//! With s = κv_S + κ′v_I the energy delta absorbs one integral exactly:
//!
//!   F_S(κ,κ′) = 1/(2π v_P) ∫ dκ₁ β̄_P(κ₁) β̄_P(K − κ₁),   K = (s + Δ)/v_P.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::RingSystem;
use crate::numerics::{integrate_1d, Grid2D, QuadOptions, SpectralGrid};
use crate::pump::IntracavityPump;

/// Samples of F_S on a (signal, idler) grid.
#[derive(Clone, Debug)]
pub struct PumpPairFunction {
    /// F_S(κ_s, κ_i), s per (rad/m) up to the pump normalisation.
    pub values: Grid2D<Complex64>,
    pub detuning: f64,
    pub v_p: f64,
    pub v_s: f64,
    pub v_i: f64,
}

impl PumpPairFunction {
    pub fn axis_s(&self) -> &SpectralGrid {
        &self.values.axis_s
    }
    pub fn axis_i(&self) -> &SpectralGrid {
        &self.values.axis_i
    }

    /// F_I(κ_i, κ_s) = F_S(κ_s, κ_i): the same samples viewed from the idler.
    pub fn idler_view(&self, ji: usize, js: usize) -> Complex64 {
        self.values.get(js, ji)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        PumpPairFunction {
            values: self.values.scale(c),
            ..self.clone()
        }
    }
}

/// Evaluates F as a function of s alone.
pub struct PairFunctionEvaluator<'a> {
    pump: &'a IntracavityPump,
    v_p: f64,
    detuning: f64,
    support: f64,
    opts: QuadOptions,
}

impl<'a> PairFunctionEvaluator<'a> {
    pub fn new(pump: &'a IntracavityPump, sys: &RingSystem, rel_tol: f64) -> Result<Self> {
        pump.check_support()?;
        let v_p = sys.pump().v;
        let support = pump.support_half_width();
        // |F| ≤ ∫|β|² dκ/(2πv_P); F far below this bound only needs absolute accuracy.
        let norm = integrate_1d(|k| pump.at(k).norm_sqr(), -support, support, QuadOptions::rel(1e-8))
            .map_err(Error::from)?;
        let bound = norm / (2.0 * PI * v_p);
        Ok(PairFunctionEvaluator {
            pump,
            v_p,
            detuning: sys.detuning(),
            support,
            opts: QuadOptions {
                rel_tol,
                abs_tol: 1e-3 * rel_tol * bound,
                ..QuadOptions::default()
            },
        })
    }

    /// F at energy offset s = κv_S + κ′v_I, rad/s.
    pub fn at_s(&self, s: f64) -> Result<Complex64> {
        let k_total = (s + self.detuning) / self.v_p;
        let r = self.support;
        let lo = (-r).max(k_total - r);
        let hi = r.min(k_total + r);
        if lo >= hi {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let f = |k1: f64| self.pump.at(k1) * self.pump.at(k_total - k1);
        // Split at the two Lorentzian peaks so the adaptive rule sees them.
        let mut cuts = vec![lo];
        for c in [0.0, k_total] {
            if c > lo && c < hi && !cuts.contains(&c) {
                cuts.push(c);
            }
        }
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        let mut acc = Complex64::new(0.0, 0.0);
        for w in cuts.windows(2) {
            acc += integrate_1d(f, w[0], w[1], self.opts).map_err(Error::from)?;
        }
        Ok(acc / (2.0 * PI * self.v_p))
    }
}

/// Fills F_S on `axis_s × axis_i`. Each distinct s is integrated once.
pub fn pump_pair_function(
    pump: &IntracavityPump,
    sys: &RingSystem,
    axis_s: &SpectralGrid,
    axis_i: &SpectralGrid,
    rel_tol: f64,
) -> Result<PumpPairFunction> {
    let eval = PairFunctionEvaluator::new(pump, sys, rel_tol)?;
    let (v_s, v_i) = (sys.signal().v, sys.idler().v);
    // Quantise s so rounding in κv_S + κ′v_I cannot split equal offsets.
    let quantum = 1e-9 * (axis_s.step() * v_s).min(axis_i.step() * v_i);
    let key = |js: usize, ji: usize| ((axis_s.point(js) * v_s + axis_i.point(ji) * v_i) / quantum).round() as i64;

    let mut keys: Vec<i64> = (0..axis_s.len())
        .flat_map(|js| (0..axis_i.len()).map(move |ji| (js, ji)))
        .map(|(js, ji)| key(js, ji))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    let values: Vec<Complex64> = keys
        .par_iter()
        .map(|&k| eval.at_s(k as f64 * quantum))
        .collect::<Result<_>>()?;
    let table: HashMap<i64, Complex64> = keys.into_iter().zip(values).collect();

    Ok(PumpPairFunction {
        values: Grid2D::from_fn(*axis_s, *axis_i, |js, ji| table[&key(js, ji)]),
        detuning: sys.detuning(),
        v_p: sys.pump().v,
        v_s,
        v_i,
    })
}
