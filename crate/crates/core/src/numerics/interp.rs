//! Band-limited resampling of uniformly sampled complex signals.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::UniformAxis;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// Whittaker–Shannon interpolation over all samples; zero-padding outside.
pub fn sinc_interpolate(values: &[Complex64], axis: &UniformAxis, x: f64) -> Complex64 {
    let u = (x - axis.start) / axis.step;
    let k = u.round();
    if (u - k).abs() < 1e-10 && k >= 0.0 && (k as usize) < values.len() {
        return values[k as usize];
    }
    // sin(π(u−j)) alternates sign with j, so evaluate it once.
    let s = (PI * u).sin() / PI;
    values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let d = u - j as f64;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            v * (sign * s / d)
        })
        .sum()
}

/// Lanczos-windowed sinc with `lobes` zero-crossings each side.
pub fn lanczos_interpolate(values: &[Complex64], axis: &UniformAxis, x: f64, lobes: usize) -> Complex64 {
    let u = (x - axis.start) / axis.step;
    let base = u.floor();
    let a = lobes as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    let lo = base as i64 - lobes as i64 + 1;
    let hi = base as i64 + lobes as i64;
    for j in lo..=hi {
        if j < 0 || j as usize >= values.len() {
            continue;
        }
        let d = u - j as f64;
        if d.abs() >= a {
            continue;
        }
        acc += values[j as usize] * (sinc(d) * sinc(d / a));
    }
    acc
}
