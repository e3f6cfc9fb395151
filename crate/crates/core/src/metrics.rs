//! Comparison metrics between full-rank and low-rank runs.

use nalgebra::{DMatrix, DVector};

use crate::lowrank::LowRankFactors;
use crate::real::Real;

/// `r (N_x + N_Ω) / (N_x N_Ω)`.
pub fn compression_ratio(n_x: usize, n_omega: usize, rank: usize) -> f64 {
    (rank as f64 * (n_x + n_omega) as f64) / (n_x as f64 * n_omega as f64)
}

/// Full-rank time divided by low-rank time; values above one mean the
/// low-rank run was faster.
pub fn speedup(full_rank_seconds: f64, low_rank_seconds: f64) -> f64 {
    full_rank_seconds / low_rank_seconds
}

/// `‖a - b‖_2`.
pub fn phi_difference<T: Real>(a: &DVector<T>, b: &DVector<T>) -> f64 {
    (a - b).norm().as_f64()
}

/// Frobenius norm of `Ψ_FR - X S V^T`, reconstructing at most `block`
/// columns of the low-rank product at a time.
pub fn psi_difference<T: Real>(psi: &DMatrix<T>, factors: &LowRankFactors<T>, block: usize) -> f64 {
    let block = block.max(1);
    let mut sum = 0.0f64;
    let mut j0 = 0;
    while j0 < psi.ncols() {
        let j1 = (j0 + block).min(psi.ncols());
        let approx = factors.columns(j0, j1);
        let diff = psi.columns(j0, j1 - j0) - approx;
        sum += diff.iter().map(|v| v.as_f64().powi(2)).sum::<f64>();
        j0 = j1;
    }
    sum.sqrt()
}
