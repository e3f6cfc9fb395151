//! Steady two-dimensional radiative transfer with discrete ordinates and an
//! upwind discontinuous Galerkin discretization.
//!
//! Two outer solvers share one discretization: full-rank source iteration
//! ([`fullrank`]) and a rank-adaptive low-rank variant ([`lowrank`]) that sweeps
//! only a greedily chosen subset of angles. Both can be accelerated by a
//! diffusion correction ([`dsa`]).
//!
//! Everything is generic over the scalar type through [`Real`]; the aliases at
//! the crate root fix it to `f64`.

pub mod dg;
pub mod dsa;
pub mod error;
pub mod fullrank;
pub mod lowrank;
pub mod mesh;
pub mod metrics;
pub mod problem;
pub mod quadrature;
pub mod real;
pub mod sweep;

pub use error::{Error, Result};
pub use problem::{constant_field, field, InnerStats, LowRankParams, SolverParams};
pub use real::Real;

pub type SpatialMesh = mesh::SpatialMesh<f64>;
pub type DGSpace = dg::DGSpace<f64>;
pub type DiscreteOperators = dg::DiscreteOperators<f64>;
pub type BoundaryVectors = dg::BoundaryVectors<f64>;
pub type AngularQuadrature = quadrature::AngularQuadrature<f64>;
pub type SweepPlan = sweep::SweepPlan<f64>;
pub type DiffusionSystem = dsa::DiffusionSystem<f64>;
pub type Field = problem::Field<f64>;
pub type ProblemSetup = problem::ProblemSetup<f64>;
pub type Discretization = problem::Discretization<f64>;
pub type SolveReport = problem::SolveReport<f64>;
pub type LowRankFactors = lowrank::LowRankFactors<f64>;
pub type Basis = lowrank::Basis<f64>;

pub type SpatialMeshF32 = mesh::SpatialMesh<f32>;
pub type AngularQuadratureF32 = quadrature::AngularQuadrature<f32>;
pub type DiscretizationF32 = problem::Discretization<f32>;
pub type SolveReportF32 = problem::SolveReport<f32>;
