//! Full-rank source iteration with optional diffusion synthetic acceleration.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::problem::{Discretization, SolveReport, SolverParams};
use crate::real::Real;

/// One source iteration: sweeps every angle against `Σ_s φ_prev + G + g_j`.
///
/// Returns the angular flux matrix (column `j` is `ψ_j`) and `φ* = Ψ w`.
pub fn si_step<T: Real>(disc: &Discretization<T>, phi_prev: &DVector<T>) -> Result<(DMatrix<T>, DVector<T>)> {
    let n = disc.n_dofs();
    let core = disc.rhs_core(phi_prev);
    let mut psi = DMatrix::zeros(n, disc.n_angles());
    let mut col = DVector::zeros(n);
    for j in 0..disc.n_angles() {
        let rhs = disc.angle_rhs(&core, j);
        disc.plan.sweep_into(j, disc.quad.direction(j), &rhs, &mut col)?;
        psi.set_column(j, &col);
    }
    let phi = disc.scalar_flux(&psi);
    Ok((psi, phi))
}

/// Same as [`si_step`] but accumulates `φ*` angle by angle without keeping `Ψ`.
pub fn si_step_streaming<T: Real>(disc: &Discretization<T>, phi_prev: &DVector<T>) -> Result<DVector<T>> {
    let n = disc.n_dofs();
    let core = disc.rhs_core(phi_prev);
    let mut phi = DVector::zeros(n);
    let mut col = DVector::zeros(n);
    for j in 0..disc.n_angles() {
        let rhs = disc.angle_rhs(&core, j);
        disc.plan.sweep_into(j, disc.quad.direction(j), &rhs, &mut col)?;
        phi.axpy(disc.quad.weight(j), &col, T::one());
    }
    Ok(phi)
}

/// Runs SI(-DSA) from a zero initial guess until `‖φ* - φ_prev‖_∞ ≤ tolerance`.
pub fn run_full_rank<T: Real>(disc: &Discretization<T>, params: &SolverParams) -> Result<SolveReport<T>> {
    let start = Instant::now();
    let n = disc.n_dofs();
    let mut phi_prev = DVector::zeros(n);
    let mut diff_l2 = Vec::new();
    let mut diff_inf = Vec::new();
    for it in 1..=params.max_iterations {
        let (psi, phi_star) = if params.store_psi {
            let (psi, phi) = si_step(disc, &phi_prev)?;
            (Some(psi), phi)
        } else {
            (None, si_step_streaming(disc, &phi_prev)?)
        };
        let diff = &phi_star - &phi_prev;
        let d_inf = diff.amax().as_f64();
        diff_l2.push(diff.norm().as_f64());
        diff_inf.push(d_inf);
        if d_inf <= params.tolerance {
            return Ok(SolveReport {
                phi: phi_star,
                iterations: it,
                diff_l2,
                diff_inf,
                wall_seconds: start.elapsed().as_secs_f64(),
                dof_count: n * disc.n_angles(),
                psi,
                low_rank: None,
            });
        }
        phi_prev = disc.accelerate(&phi_star, &phi_prev, params.use_dsa)?;
    }
    Err(Error::MaxIterationsExceeded {
        iterations: params.max_iterations,
        last_change: diff_inf.last().copied().unwrap_or(f64::NAN),
    })
}
