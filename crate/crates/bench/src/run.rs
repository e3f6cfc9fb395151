//! Executes the configured drivers and compares their results.

use std::time::Instant;

use rte_core::fullrank::run_full_rank;
use rte_core::lowrank::run_low_rank;
use rte_core::metrics::{compression_ratio, phi_difference, psi_difference, speedup};
use rte_core::{Discretization, SolveReport};

use crate::config::{ConfigError, RunConfig};

/// Failure of a benchmark run.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{solver} solver did not converge: {source}")]
    NotConverged { solver: &'static str, source: rte_core::Error },
    #[error("{solver} solver failed: {source}")]
    Solver { solver: &'static str, source: rte_core::Error },
    #[error("cannot compare runs with different discretizations: {0}")]
    Mismatch(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl RunError {
    /// Process exit code: 2 for non-convergence, 3 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::NotConverged { .. } => 2,
            RunError::Config(_) | RunError::Mismatch(_) => 3,
            RunError::Solver { source: rte_core::Error::InvalidArgument(_), .. } => 3,
            _ => 1,
        }
    }

    fn from_solver(solver: &'static str, e: rte_core::Error) -> Self {
        match e {
            rte_core::Error::MaxIterationsExceeded { .. } => RunError::NotConverged { solver, source: e },
            _ => RunError::Solver { solver, source: e },
        }
    }
}

/// Cross-driver metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    /// Full-rank time over low-rank time.
    pub speedup: f64,
    pub compression_ratio: f64,
    pub phi_diff: f64,
    /// Needs the stored full-rank angular flux.
    pub psi_diff: Option<f64>,
}

/// Everything produced by one configuration.
#[derive(Debug)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub disc: Discretization,
    pub assembly_seconds: f64,
    pub full: Option<SolveReport>,
    pub low: Option<SolveReport>,
    pub comparison: Option<Comparison>,
}

impl RunOutcome {
    /// Truncated rank of the final low-rank iterate.
    pub fn rank(&self) -> Option<usize> {
        self.low.as_ref().and_then(|r| r.low_rank.as_ref()).map(|o| o.final_rank())
    }

    /// `r' (N_x + N_Ω) / (N_x N_Ω)` of the low-rank run.
    pub fn compression_ratio(&self) -> Option<f64> {
        self.rank().map(|r| compression_ratio(self.disc.n_dofs(), self.disc.n_angles(), r))
    }
}

/// Runs the drivers requested by `cfg.mode` on one shared discretization.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    let t = Instant::now();
    let disc = Discretization::new(&cfg.setup(), cfg.solver.use_dsa).map_err(|e| RunError::Solver { solver: "assembly", source: e })?;
    let assembly_seconds = t.elapsed().as_secs_f64();
    let full = if cfg.mode.runs_full() {
        Some(run_full_rank(&disc, &cfg.solver).map_err(|e| RunError::from_solver("full-rank", e))?)
    } else {
        None
    };
    let low = if cfg.mode.runs_low_rank() {
        Some(run_low_rank(&disc, &cfg.solver, &cfg.lowrank).map_err(|e| RunError::from_solver("low-rank", e))?)
    } else {
        None
    };
    let comparison = match (&full, &low) {
        (Some(f), Some(l)) => Some(compare(f, l)?),
        _ => None,
    };
    Ok(RunOutcome { config: cfg.clone(), disc, assembly_seconds, full, low, comparison })
}

/// Compares a full-rank and a low-rank report of the same discretization.
pub fn compare(full: &SolveReport, low: &SolveReport) -> Result<Comparison, RunError> {
    if full.phi.len() != low.phi.len() {
        return Err(RunError::Mismatch(format!("{} vs {} spatial unknowns", full.phi.len(), low.phi.len())));
    }
    let factors = low.low_rank.as_ref().and_then(|o| o.factors.as_ref());
    let psi_diff = match (&full.psi, factors) {
        (Some(psi), Some(f)) => {
            if psi.ncols() != f.v.nrows() || psi.nrows() != f.x.nrows() {
                return Err(RunError::Mismatch(format!("angular flux {}x{} vs factors {}x{}", psi.nrows(), psi.ncols(), f.x.nrows(), f.v.nrows())));
            }
            Some(psi_difference(psi, f, 32))
        }
        _ => None,
    };
    Ok(Comparison {
        speedup: speedup(full.wall_seconds, low.wall_seconds),
        compression_ratio: low.dof_count as f64 / full.dof_count as f64,
        phi_diff: phi_difference(&full.phi, &low.phi),
        psi_diff,
    })
}
