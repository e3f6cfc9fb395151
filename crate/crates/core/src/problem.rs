//! Problem description, the assembled discretization shared by both drivers,
//! and solver parameters/reports.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::dg::{assemble_operators, csr_axpy, project_source, BoundaryVectors, DGSpace, DiscreteOperators};
use crate::dsa::{build_diffusion, DiffusionSystem};
use crate::error::{Error, Result};
use crate::lowrank::LowRankFactors;
use crate::mesh::SpatialMesh;
use crate::quadrature::AngularQuadrature;
use crate::real::Real;
use crate::sweep::SweepPlan;

/// Scalar field `f(x, y)`.
pub type Field<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

/// Wraps a closure as a [`Field`].
pub fn field<T, F>(f: F) -> Field<T>
where
    F: Fn(T, T) -> T + Send + Sync + 'static,
{
    Arc::new(f)
}

pub fn constant_field<T: Real>(v: T) -> Field<T> {
    Arc::new(move |_, _| v)
}

/// Continuous problem plus discretization sizes.
#[derive(Clone)]
pub struct ProblemSetup<T> {
    pub x_left: T,
    pub x_right: T,
    pub y_bottom: T,
    pub y_top: T,
    pub nx: usize,
    pub ny: usize,
    pub n_theta: usize,
    pub n_omega_z: usize,
    pub degree: usize,
    pub sigma_s: Field<T>,
    pub sigma_a: Field<T>,
    pub source: Field<T>,
    /// Inflow data `g(x, y)` on the boundary (isotropic).
    pub inflow: Field<T>,
}

impl<T: Real> fmt::Debug for ProblemSetup<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSetup")
            .field("domain", &(self.x_left, self.x_right, self.y_bottom, self.y_top))
            .field("cells", &(self.nx, self.ny))
            .field("quadrature", &(self.n_theta, self.n_omega_z))
            .field("degree", &self.degree)
            .finish_non_exhaustive()
    }
}

impl<T: Real> ProblemSetup<T> {
    /// Homogeneous medium on `[x0, x1] x [y0, y1]` with zero inflow.
    pub fn homogeneous(bounds: (T, T, T, T), cells: (usize, usize), quad: (usize, usize), sigma_s: T, sigma_a: T, source: Field<T>) -> Self {
        Self {
            x_left: bounds.0,
            x_right: bounds.1,
            y_bottom: bounds.2,
            y_top: bounds.3,
            nx: cells.0,
            ny: cells.1,
            n_theta: quad.0,
            n_omega_z: quad.1,
            degree: 1,
            sigma_s: constant_field(sigma_s),
            sigma_a: constant_field(sigma_a),
            source,
            inflow: constant_field(T::zero()),
        }
    }
}

/// Everything assembled from a [`ProblemSetup`]: mesh, DG space, quadrature,
/// sparse operators, source and boundary vectors, sweep blocks and the
/// factored diffusion operator.
#[derive(Debug, Clone)]
pub struct Discretization<T: Real> {
    pub space: DGSpace<T>,
    pub quad: AngularQuadrature<T>,
    pub ops: DiscreteOperators<T>,
    pub source: DVector<T>,
    pub boundary: BoundaryVectors<T>,
    pub plan: SweepPlan<T>,
    pub diffusion: Option<DiffusionSystem<T>>,
}

impl<T: Real> Discretization<T> {
    /// Assembles the discretization. The diffusion operator is built when
    /// `with_diffusion` is set.
    pub fn new(setup: &ProblemSetup<T>, with_diffusion: bool) -> Result<Self> {
        let mesh = SpatialMesh::new(setup.x_left, setup.x_right, setup.y_bottom, setup.y_top, setup.nx, setup.ny)?;
        let space = DGSpace::new(mesh, setup.degree)?;
        let quad = AngularQuadrature::chebyshev_legendre(setup.n_theta, setup.n_omega_z)?;
        let ops = assemble_operators(&space, setup.sigma_s.as_ref(), setup.sigma_a.as_ref())?;
        let source = project_source(&space, setup.source.as_ref());
        let boundary = BoundaryVectors::assemble(&space, setup.inflow.as_ref());
        let plan = SweepPlan::new(&space, &ops);
        let diffusion = if with_diffusion { Some(build_diffusion(&space, &ops)?) } else { None };
        Ok(Self { space, quad, ops, source, boundary, plan, diffusion })
    }

    pub fn n_dofs(&self) -> usize {
        self.space.n_dofs()
    }

    pub fn n_angles(&self) -> usize {
        self.quad.len()
    }

    /// Angle-independent part of the SI right-hand side, `Σ_s φ + G`.
    pub fn rhs_core(&self, phi: &DVector<T>) -> DVector<T> {
        let mut out = self.source.clone();
        csr_axpy(&self.ops.sigma_s, T::one(), phi, &mut out);
        out
    }

    /// `core + g_j^bc`.
    pub fn angle_rhs(&self, core: &DVector<T>, j: usize) -> DVector<T> {
        let mut out = core.clone();
        self.boundary.add_to(self.quad.direction(j), &mut out);
        out
    }

    /// Sweeps angle `j` against the given right-hand-side core.
    pub fn sweep_angle(&self, core: &DVector<T>, j: usize) -> Result<DVector<T>> {
        let rhs = self.angle_rhs(core, j);
        self.plan.sweep(j, self.quad.direction(j), &rhs)
    }

    /// Weighted angular sum `Σ_j ω_j ψ_j` of the columns of `psi`.
    pub fn scalar_flux(&self, psi: &DMatrix<T>) -> DVector<T> {
        let w = DVector::from_column_slice(self.quad.weights());
        psi * w
    }

    /// Applies the diffusion correction, or returns `φ*` unchanged when no
    /// diffusion operator was built.
    pub(crate) fn accelerate(&self, phi_star: &DVector<T>, phi_prev: &DVector<T>, use_dsa: bool) -> Result<DVector<T>> {
        if !use_dsa {
            return Ok(phi_star.clone());
        }
        let sys = self
            .diffusion
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("acceleration requested but no diffusion operator was built".into()))?;
        Ok(phi_star + sys.correction(phi_star, phi_prev)?)
    }
}

/// Outer iteration controls shared by both drivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    /// Outer stopping tolerance on `‖φ* - φ_prev‖_∞`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub use_dsa: bool,
    /// Keep the final angular flux matrix (full-rank driver).
    pub store_psi: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self { tolerance: 1e-6, max_iterations: 500, use_dsa: true, store_psi: true }
    }
}

/// Inner-loop controls of the low-rank driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowRankParams {
    /// Angles added per inner iteration.
    pub p: usize,
    /// Candidate pool size per inner iteration.
    pub q: usize,
    pub eps_res: f64,
    pub eps_diff: f64,
    pub eps_svd: f64,
    pub eps_mgs: f64,
    /// Snapshots whose orthogonal remainder is below this fraction of their norm are dropped.
    pub drop_tolerance: f64,
    pub seed: u64,
}

impl Default for LowRankParams {
    fn default() -> Self {
        Self { p: 1, q: 8, eps_res: 1e-7, eps_diff: 1e-7, eps_svd: 1e-8, eps_mgs: 1e-10, drop_tolerance: 1e-12, seed: 0 }
    }
}

impl LowRankParams {
    pub fn validate(&self, n_angles: usize) -> Result<()> {
        if self.p == 0 || self.p > n_angles {
            return Err(Error::InvalidArgument(format!("p must lie in 1..={n_angles}, got {}", self.p)));
        }
        if self.q < self.p {
            return Err(Error::InvalidArgument(format!("q ({}) must be at least p ({})", self.q, self.p)));
        }
        for (name, v) in [
            ("eps_res", self.eps_res),
            ("eps_diff", self.eps_diff),
            ("eps_svd", self.eps_svd),
            ("eps_mgs", self.eps_mgs),
            ("drop_tolerance", self.drop_tolerance),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Statistics of one low-rank inner loop.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerStats {
    /// Basis size after each inner iteration.
    pub rank_per_iteration: Vec<usize>,
    /// Largest candidate residual per inner iteration (`NaN` when no candidates were drawn).
    pub max_residual: Vec<f64>,
    /// Angles in the order they were swept.
    pub sampled_angles: Vec<usize>,
    /// Number of full re-orthogonalizations.
    pub reorthogonalizations: usize,
    /// Snapshots dropped as linearly dependent.
    pub dropped: usize,
    /// Final basis size `r_k`.
    pub basis_rank: usize,
    /// Rank after truncation.
    pub truncated_rank: usize,
    /// `(r_k - truncated) / truncated`. Snapshots dropped as dependent do
    /// not count; `sampled_angles` has the raw sweep count.
    pub oversampling: f64,
    /// Every angle was swept, so the step equals a full-rank SI step.
    pub exhausted: bool,
}

/// Extra output of the low-rank driver.
#[derive(Debug, Clone)]
pub struct LowRankOutcome<T: Real> {
    pub inner: Vec<InnerStats>,
    pub factors: Option<LowRankFactors<T>>,
}

impl<T: Real> LowRankOutcome<T> {
    pub fn final_rank(&self) -> usize {
        self.inner.last().map_or(0, |s| s.truncated_rank)
    }
}

/// Result of an outer SI(-DSA) run.
#[derive(Debug, Clone)]
pub struct SolveReport<T: Real> {
    /// Converged scalar flux (DG coefficients).
    pub phi: DVector<T>,
    pub iterations: usize,
    /// `‖φ* - φ_prev‖_2` per outer iteration.
    pub diff_l2: Vec<f64>,
    /// `‖φ* - φ_prev‖_∞` per outer iteration.
    pub diff_inf: Vec<f64>,
    pub wall_seconds: f64,
    /// Stored angular-flux entries: `N_x N_Ω` or `r (N_x + N_Ω)`.
    pub dof_count: usize,
    /// Final angular flux matrix (full-rank driver with `store_psi`).
    pub psi: Option<DMatrix<T>>,
    pub low_rank: Option<LowRankOutcome<T>>,
}
