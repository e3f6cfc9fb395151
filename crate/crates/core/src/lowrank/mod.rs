//! Rank-adaptive low-rank source iteration.
//!
//! Each outer iteration builds a spatial basis from transport sweeps of a few
//! greedily chosen angles and obtains every other angle by a Galerkin solve in
//! that basis. Angles are added one batch at a time until the largest residual
//! of a random candidate pool and the change in the reconstructed scalar flux
//! both fall below their tolerances.

mod basis;
mod projection;
mod sampling;
mod truncation;

use std::collections::HashMap;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use basis::{Basis, BasisUpdate};
pub use projection::{ProjectedKind, ProjectedOperators};
pub use sampling::{draw_candidates, initial_angles, select_largest};
pub use truncation::{singular_values, truncate, truncate_dense, truncation_rank, LowRankFactors};

use crate::error::{Error, Result};
use crate::problem::{Discretization, InnerStats, LowRankOutcome, LowRankParams, SolveReport, SolverParams};
use crate::real::Real;

/// Basis, coefficient record and projected operators of one inner loop, with
/// the right-hand-side core `Σ_s φ_prev + G` frozen at construction.
#[derive(Debug, Clone)]
pub struct LowRankState<'a, T: Real> {
    disc: &'a Discretization<T>,
    core: DVector<T>,
    basis: Basis<T>,
    proj: ProjectedOperators<T>,
    /// Sampled angles in insertion order; position = record index in the basis.
    sampled: Vec<usize>,
    record_of: Vec<Option<usize>>,
    reorthogonalizations: usize,
    dropped: usize,
}

impl<'a, T: Real> LowRankState<'a, T> {
    pub fn new(disc: &'a Discretization<T>, phi_prev: &DVector<T>) -> Self {
        Self {
            disc,
            core: disc.rhs_core(phi_prev),
            basis: Basis::new(disc.n_dofs()),
            proj: ProjectedOperators::new(&disc.boundary),
            sampled: Vec::new(),
            record_of: vec![None; disc.n_angles()],
            reorthogonalizations: 0,
            dropped: 0,
        }
    }

    pub fn basis(&self) -> &Basis<T> {
        &self.basis
    }

    pub fn projections(&self) -> &ProjectedOperators<T> {
        &self.proj
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn sampled(&self) -> &[usize] {
        &self.sampled
    }

    pub fn is_sampled(&self, j: usize) -> bool {
        self.record_of[j].is_some()
    }

    pub fn unsampled(&self) -> Vec<usize> {
        (0..self.disc.n_angles()).filter(|&j| !self.is_sampled(j)).collect()
    }

    pub fn reorthogonalizations(&self) -> usize {
        self.reorthogonalizations
    }

    /// Right-hand side of angle `j`.
    pub fn rhs(&self, j: usize) -> DVector<T> {
        self.disc.angle_rhs(&self.core, j)
    }

    /// Sweeps the given (unsampled) angles and adds their solutions to the basis.
    pub fn sample_angles(&mut self, angles: &[usize], params: &LowRankParams) -> Result<BasisUpdate> {
        let mut snaps = Vec::with_capacity(angles.len());
        for &j in angles {
            snaps.push(self.disc.sweep_angle(&self.core, j)?);
        }
        Ok(self.insert_snapshots(angles, &snaps, params))
    }

    /// Adds precomputed snapshots for `angles` and updates the projections.
    pub fn insert_snapshots(&mut self, angles: &[usize], snapshots: &[DVector<T>], params: &LowRankParams) -> BasisUpdate {
        assert_eq!(angles.len(), snapshots.len());
        for &j in angles {
            assert!(self.record_of[j].is_none(), "angle {j} sampled twice");
            self.record_of[j] = Some(self.sampled.len());
            self.sampled.push(j);
        }
        let old_rank = self.basis.rank();
        let update = self.basis.insert(snapshots, T::lit(params.eps_mgs), T::lit(params.drop_tolerance));
        self.dropped += update.dropped;
        if update.reorthogonalized {
            self.reorthogonalizations += 1;
            self.proj.rebuild(&self.disc.ops, &self.disc.boundary, &self.core, &self.basis);
        } else {
            self.proj.extend(&self.disc.ops, &self.disc.boundary, &self.core, &self.basis, old_rank);
        }
        update
    }

    /// Galerkin coefficients `c_j` with `X^T (D_j + Σ_t) X c_j = X^T b_j`.
    pub fn galerkin(&self, j: usize) -> Result<DVector<T>> {
        let omega = self.disc.quad.direction(j);
        let a = self.proj.reduced_matrix(omega);
        let b = self.proj.reduced_rhs(omega);
        let rank = self.rank();
        let sol = a.lu().solve(&b).ok_or(Error::SingularReducedSystem { angle: j, rank })?;
        if sol.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularReducedSystem { angle: j, rank });
        }
        Ok(sol)
    }

    /// `b_j - (D_j + Σ_t) X c`.
    pub fn residual(&self, j: usize, c: &DVector<T>) -> DVector<T> {
        let xc = self.basis.apply(c.as_slice());
        self.rhs(j) - self.disc.plan.apply(self.disc.quad.direction(j), &xc)
    }

    /// `‖b_j - (D_j + Σ_t) X c_j‖` for several angles, forming `X [c_j]` as one product.
    pub fn residual_norms(&self, angles: &[usize], coeffs: &[DVector<T>]) -> Vec<T> {
        assert_eq!(angles.len(), coeffs.len());
        let c = DMatrix::from_fn(self.rank(), coeffs.len(), |i, k| coeffs[k][i]);
        let xc = self.basis.apply_block(&c);
        angles
            .iter()
            .enumerate()
            .map(|(k, &j)| {
                let v = xc.column(k).into_owned();
                (self.rhs(j) - self.disc.plan.apply(self.disc.quad.direction(j), &v)).norm()
            })
            .collect()
    }

    /// Coefficient matrix `C` (`r x N_Ω`): recorded coefficients for sampled
    /// angles, Galerkin solutions for the rest.
    pub fn coefficient_matrix(&self) -> Result<DMatrix<T>> {
        let n_angles = self.disc.n_angles();
        let mut c = DMatrix::zeros(self.rank(), n_angles);
        // the reduced system only sees (Ω_x, Ω_y), so ±Ω_z pairs share a solution
        let mut solved: HashMap<(u64, u64), usize> = HashMap::new();
        for j in 0..n_angles {
            let col = match self.record_of[j] {
                Some(s) => self.basis.record(s),
                None => {
                    let [ox, oy, _] = self.disc.quad.direction(j);
                    let key = (ox.as_f64().to_bits(), oy.as_f64().to_bits());
                    match solved.get(&key) {
                        Some(&k) => c.column(k).into_owned(),
                        None => {
                            solved.insert(key, j);
                            self.galerkin(j)?
                        }
                    }
                }
            };
            c.set_column(j, &col);
        }
        Ok(c)
    }

    /// Recomputes the sampled sweeps and direct projections and compares them
    /// with the maintained state.
    pub fn diagnostics(&self) -> Result<Diagnostics> {
        let mut direct = ProjectedOperators::new(&self.disc.boundary);
        direct.rebuild(&self.disc.ops, &self.disc.boundary, &self.core, &self.basis);
        let rel = |a: T, b: T| if b == T::zero() { a.as_f64() } else { (a / b).as_f64() };
        let mut projection = 0.0f64;
        for kind in ProjectedKind::ALL {
            let d = direct.get(kind);
            projection = projection.max(rel((self.proj.get(kind) - d).norm(), d.norm()));
        }
        projection = projection.max(rel((self.proj.core() - direct.core()).norm(), direct.core().norm()));
        for j in 0..self.disc.n_angles().min(4) {
            let omega = self.disc.quad.direction(j);
            let d = direct.reduced_rhs(omega);
            projection = projection.max(rel((self.proj.reduced_rhs(omega) - &d).norm(), d.norm()));
        }

        let mut galerkin = 0.0f64;
        let mut err2 = T::zero();
        let mut norm2 = T::zero();
        for (s, &j) in self.sampled.iter().enumerate() {
            let psi = self.disc.sweep_angle(&self.core, j)?;
            let xr = self.basis.apply(self.basis.record(s).as_slice());
            err2 += (&xr - &psi).norm_squared();
            norm2 += psi.norm_squared();
            let xc = self.basis.apply(self.galerkin(j)?.as_slice());
            galerkin = galerkin.max(rel((&xc - &psi).norm(), psi.norm()));
        }
        Ok(Diagnostics {
            orthogonality: self.basis.orthogonality_error().as_f64(),
            projection,
            galerkin,
            snapshots: rel(err2.sqrt(), norm2.sqrt()),
        })
    }

    /// `φ = X (C w)`.
    pub fn scalar_flux(&self, c: &DMatrix<T>) -> DVector<T> {
        let w = DVector::from_column_slice(self.disc.quad.weights());
        let cw = c * w;
        self.basis.apply(cw.as_slice())
    }
}

/// Measured invariants of a [`LowRankState`], all relative except orthogonality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// `‖X^T X - I‖_F`.
    pub orthogonality: f64,
    /// Worst `‖P_inc - X^T A X‖_F / ‖X^T A X‖_F` over the projected operators and vectors.
    pub projection: f64,
    /// Worst `‖X c_j - ψ_j‖ / ‖ψ_j‖` over sampled angles.
    pub galerkin: f64,
    /// `‖X R - [ψ_s]‖_F / ‖[ψ_s]‖_F`.
    pub snapshots: f64,
}

/// Result of one low-rank inner loop.
#[derive(Debug, Clone)]
pub struct InnerResult<T: Real> {
    pub phi_star: DVector<T>,
    pub basis: Basis<T>,
    pub coefficients: DMatrix<T>,
    pub stats: InnerStats,
}

/// One low-rank SI step from `phi_prev`.
///
/// The returned statistics have `truncated_rank` and `oversampling` filled from
/// the singular values of the coefficient matrix.
pub fn low_rank_si<T: Real>(disc: &Discretization<T>, phi_prev: &DVector<T>, params: &LowRankParams, rng: &mut ChaCha8Rng) -> Result<InnerResult<T>> {
    params.validate(disc.n_angles())?;
    let mut state = LowRankState::new(disc, phi_prev);
    let mut stats = InnerStats {
        rank_per_iteration: Vec::new(),
        max_residual: Vec::new(),
        sampled_angles: Vec::new(),
        reorthogonalizations: 0,
        dropped: 0,
        basis_rank: 0,
        truncated_rank: 0,
        oversampling: 0.0,
        exhausted: false,
    };
    let first = initial_angles(rng, params.p, disc.n_angles());
    state.sample_angles(&first, params)?;
    stats.rank_per_iteration.push(state.rank());

    let eps_res = T::lit(params.eps_res);
    let eps_diff = T::lit(params.eps_diff);
    let mut phi_old = phi_prev.clone();
    let (phi_star, coefficients) = loop {
        let unsampled = state.unsampled();
        if unsampled.is_empty() {
            stats.exhausted = true;
            let c = state.coefficient_matrix()?;
            break (state.scalar_flux(&c), c);
        }
        let candidates = draw_candidates(rng, &unsampled, params.q);
        let coeffs = candidates.iter().map(|&j| state.galerkin(j)).collect::<Result<Vec<_>>>()?;
        let norms = state.residual_norms(&candidates, &coeffs);
        let mut scored = Vec::with_capacity(candidates.len());
        let mut max_res = T::zero();
        for (&j, &r) in candidates.iter().zip(&norms) {
            max_res = max_res.max(r);
            scored.push((j, r.as_f64()));
        }
        stats.max_residual.push(max_res.as_f64());
        if max_res < eps_res {
            let c = state.coefficient_matrix()?;
            let phi = state.scalar_flux(&c);
            if (&phi - &phi_old).norm() <= eps_diff {
                break (phi, c);
            }
            phi_old = phi;
        }
        let chosen = select_largest(&scored, params.p);
        state.sample_angles(&chosen, params)?;
        stats.rank_per_iteration.push(state.rank());
    };

    stats.sampled_angles = state.sampled().to_vec();
    stats.reorthogonalizations = state.reorthogonalizations();
    stats.dropped = state.dropped;
    stats.basis_rank = state.rank();
    let sv = singular_values(&coefficients);
    stats.truncated_rank = truncation_rank(&sv, T::lit(params.eps_svd));
    stats.oversampling = oversampling_ratio(stats.basis_rank, stats.truncated_rank);
    Ok(InnerResult { phi_star, basis: state.basis, coefficients, stats })
}

/// `(basis_rank - rank) / rank`; `NaN` for rank zero.
pub fn oversampling_ratio(basis_rank: usize, rank: usize) -> f64 {
    if rank == 0 {
        return f64::NAN;
    }
    (basis_rank as f64 - rank as f64) / rank as f64
}

/// Low-rank SI(-DSA) from a zero initial guess. Factors are formed for the
/// final outer iteration only.
pub fn run_low_rank<T: Real>(disc: &Discretization<T>, params: &SolverParams, lr: &LowRankParams) -> Result<SolveReport<T>> {
    lr.validate(disc.n_angles())?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(lr.seed);
    let n = disc.n_dofs();
    let mut phi_prev = DVector::zeros(n);
    let mut diff_l2 = Vec::new();
    let mut diff_inf = Vec::new();
    let mut inner = Vec::new();
    for it in 1..=params.max_iterations {
        let res = low_rank_si(disc, &phi_prev, lr, &mut rng)?;
        let diff = &res.phi_star - &phi_prev;
        let d_inf = diff.amax().as_f64();
        diff_l2.push(diff.norm().as_f64());
        diff_inf.push(d_inf);
        inner.push(res.stats);
        if d_inf <= params.tolerance {
            let factors = truncate(&res.coefficients, &res.basis, T::lit(lr.eps_svd));
            let dof_count = factors.dof_count();
            return Ok(SolveReport {
                phi: res.phi_star,
                iterations: it,
                diff_l2,
                diff_inf,
                wall_seconds: start.elapsed().as_secs_f64(),
                dof_count,
                psi: None,
                low_rank: Some(LowRankOutcome { inner, factors: Some(factors) }),
            });
        }
        phi_prev = disc.accelerate(&res.phi_star, &phi_prev, params.use_dsa)?;
    }
    Err(Error::MaxIterationsExceeded {
        iterations: params.max_iterations,
        last_change: diff_inf.last().copied().unwrap_or(f64::NAN),
    })
}
