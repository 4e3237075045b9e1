use nalgebra::DMatrix;
use num_complex::Complex64;

use super::grid::Grid2D;
use crate::error::{Error, Result};

/// Singular-value decomposition of a sampled kernel K[s, i] = Σ σ_n u_n[s] v_n[i]*.
#[derive(Clone, Debug)]
pub struct KernelSvd {
    /// Non-negative, descending.
    pub singular_values: Vec<f64>,
    /// Left modes sampled on the signal axis, one `Vec` per singular value.
    pub left: Vec<Vec<Complex64>>,
    /// Right modes sampled on the idler axis (conjugated so that
    /// K = Σ σ_n left_n ⊗ right_n).
    pub right: Vec<Vec<Complex64>>,
    /// ‖K − Σσ u v‖_F / ‖K‖_F.
    pub reconstruction_error: f64,
}

pub fn svd_kernel(k: &Grid2D<Complex64>) -> Result<KernelSvd> {
    if !k.all_finite() {
        return Err(Error::NonFinite("svd input kernel"));
    }
    let (rows, cols) = k.shape();
    let m = DMatrix::from_row_slice(rows, cols, k.values());
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested Vᵀ");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let singular_values: Vec<f64> = order.iter().map(|&n| svd.singular_values[n].max(0.0)).collect();
    let left: Vec<Vec<Complex64>> = order.iter().map(|&n| u.column(n).iter().copied().collect()).collect();
    let right: Vec<Vec<Complex64>> = order.iter().map(|&n| v_t.row(n).iter().copied().collect()).collect();

    let mut recon = DMatrix::<Complex64>::zeros(rows, cols);
    for (n, s) in singular_values.iter().enumerate() {
        for r in 0..rows {
            let a = left[n][r] * *s;
            for c in 0..cols {
                recon[(r, c)] += a * right[n][c];
            }
        }
    }
    let norm = m.norm();
    let reconstruction_error = if norm > 0.0 { (recon - &m).norm() / norm } else { 0.0 };

    Ok(KernelSvd {
        singular_values,
        left,
        right,
        reconstruction_error,
    })
}
