//! Uniform-grid Fourier pairs in the envelope convention
//!
//!   b(κ) = v ∫ dt/√(2π) b(t) e^{iκvt},   b(t) = ∫ dκ/√(2π) b(κ) e^{−iκvt}.
//!
//! With x = vt both directions are the unitary transform between x and κ,
//! which is what the FFT-backed routines implement.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::UniformAxis;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Time envelope → wavevector spectrum.
    TimeToSpectrum,
    /// Wavevector spectrum → time envelope.
    SpectrumToTime,
}

#[derive(Clone, Debug)]
pub struct FourierResult {
    pub axis: UniformAxis,
    pub values: Vec<Complex64>,
    /// Input not decayed at its edges (edge > 1e−6 of peak).
    pub aliasing: bool,
}

const ALIAS_THRESHOLD: f64 = 1e-6;

fn edges_decayed(values: &[Complex64]) -> bool {
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return true;
    }
    let edge = values[0].norm().max(values[values.len() - 1].norm());
    edge <= ALIAS_THRESHOLD * peak
}

/// Step of the conjugate axis for `n` samples spaced `step` apart.
pub fn conjugate_step(input: &UniformAxis, speed: f64, direction: Direction) -> f64 {
    let n = input.len as f64;
    match direction {
        Direction::TimeToSpectrum => 2.0 * PI / (n * speed * input.step),
        Direction::SpectrumToTime => 2.0 * PI / (n * input.step) / speed,
    }
}

/// Transform onto the conjugate grid starting at `output_start`.
pub fn fourier_transform(
    values: &[Complex64],
    input: &UniformAxis,
    speed: f64,
    direction: Direction,
    output_start: f64,
) -> FourierResult {
    assert_eq!(values.len(), input.len, "sample count must match the axis");
    let n = values.len();
    let out_step = conjugate_step(input, speed, direction);
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex64>;
    let out: Vec<Complex64>;
    match direction {
        Direction::TimeToSpectrum => {
            let dx = speed * input.step;
            let x0 = speed * input.start;
            let k0 = output_start;
            buf = values
                .iter()
                .enumerate()
                .map(|(j, f)| f * Complex64::from_polar(1.0, k0 * j as f64 * dx))
                .collect();
            planner.plan_fft_inverse(n).process(&mut buf);
            let scale = dx / (2.0 * PI).sqrt();
            out = buf
                .iter()
                .enumerate()
                .map(|(m, s)| {
                    let kappa = k0 + m as f64 * out_step;
                    s * Complex64::from_polar(scale, kappa * x0)
                })
                .collect();
        }
        Direction::SpectrumToTime => {
            let dk = input.step;
            let k0 = input.start;
            let x0 = speed * output_start;
            let dx = speed * out_step;
            buf = values
                .iter()
                .enumerate()
                .map(|(j, f)| f * Complex64::from_polar(1.0, -(j as f64) * dk * x0))
                .collect();
            planner.plan_fft_forward(n).process(&mut buf);
            let scale = dk / (2.0 * PI).sqrt();
            out = buf
                .iter()
                .enumerate()
                .map(|(m, s)| {
                    let x = x0 + m as f64 * dx;
                    s * Complex64::from_polar(scale, -k0 * x)
                })
                .collect();
        }
    }
    FourierResult {
        axis: UniformAxis::new(output_start, out_step, n),
        values: out,
        aliasing: !edges_decayed(values),
    }
}

/// Transform onto a conjugate grid centred on zero.
pub fn fourier_pair(values: &[Complex64], input: &UniformAxis, speed: f64, direction: Direction) -> FourierResult {
    let step = conjugate_step(input, speed, direction);
    let start = UniformAxis::centered(step, input.len).start;
    fourier_transform(values, input, speed, direction, start)
}

/// Direct (non-FFT) evaluation of the transform at arbitrary points,
/// using rectangle weights on the input samples.
pub fn fourier_at(values: &[Complex64], input: &UniformAxis, speed: f64, direction: Direction, points: &[f64]) -> Vec<Complex64> {
    let norm = 1.0 / (2.0 * PI).sqrt();
    points
        .iter()
        .map(|&p| {
            let (weight, sign) = match direction {
                Direction::TimeToSpectrum => (speed * input.step * norm, 1.0),
                Direction::SpectrumToTime => (input.step * norm, -1.0),
            };
            // phase per sample = sign·κ·v·t (time→spectrum: p = κ, samples in t;
            // spectrum→time: p = t, samples in κ).
            let phase_step = sign * speed * p * input.step;
            let phase0 = sign * speed * p * input.start;
            let rot = Complex64::from_polar(1.0, phase_step);
            let mut w = Complex64::from_polar(1.0, phase0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, f) in values.iter().enumerate() {
                if j % 256 == 0 {
                    // Resynchronise the recurrence to bound rounding drift.
                    w = Complex64::from_polar(1.0, phase0 + j as f64 * phase_step);
                }
                acc += f * w;
                w *= rot;
            }
            acc * weight
        })
        .collect()
}
