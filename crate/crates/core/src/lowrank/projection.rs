//! Projected operators `X^T A X` and right-hand-side pieces, maintained as the
//! basis grows.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::CsrMatrix;

use super::basis::Basis;
use crate::dg::{csr_mul, csr_mul_transpose, BoundaryVectors, DiscreteOperators};
use crate::real::Real;

/// Which projected operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectedKind {
    XMinus,
    XPlus,
    YMinus,
    YPlus,
    Total,
}

impl ProjectedKind {
    pub const ALL: [ProjectedKind; 5] = [Self::XMinus, Self::XPlus, Self::YMinus, Self::YPlus, Self::Total];

    fn index(self) -> usize {
        self as usize
    }

    pub fn source<T: Real>(self, ops: &DiscreteOperators<T>) -> &CsrMatrix<T> {
        match self {
            Self::XMinus => &ops.dx_minus,
            Self::XPlus => &ops.dx_plus,
            Self::YMinus => &ops.dy_minus,
            Self::YPlus => &ops.dy_plus,
            Self::Total => &ops.sigma_t,
        }
    }
}

/// `X^T A X` for the four streaming matrices and `Σ_t`, plus `X^T (Σ_s φ + G)`
/// and the projections of the four inflow edge vectors.
#[derive(Debug, Clone)]
pub struct ProjectedOperators<T: Real> {
    rank: usize,
    mats: [DMatrix<T>; 5],
    core: DVector<T>,
    edges: Option<[DVector<T>; 4]>,
}

impl<T: Real> ProjectedOperators<T> {
    pub fn new(boundary: &BoundaryVectors<T>) -> Self {
        let z = || DMatrix::zeros(0, 0);
        let edges = (!boundary.is_zero()).then(|| std::array::from_fn(|_| DVector::zeros(0)));
        Self { rank: 0, mats: [z(), z(), z(), z(), z()], core: DVector::zeros(0), edges }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, kind: ProjectedKind) -> &DMatrix<T> {
        &self.mats[kind.index()]
    }

    pub fn core(&self) -> &DVector<T> {
        &self.core
    }

    /// Borders every projection with the columns `old_rank..basis.rank()`.
    ///
    /// Valid only while the first `old_rank` columns are unchanged.
    pub fn extend(&mut self, ops: &DiscreteOperators<T>, boundary: &BoundaryVectors<T>, core: &DVector<T>, basis: &Basis<T>, old_rank: usize) {
        assert_eq!(old_rank, self.rank, "projection out of sync with basis");
        let r = basis.rank();
        if r == old_rank {
            return;
        }
        let p = r - old_rank;
        let n = basis.n_rows();
        // columns [A P | A^T P] for D_x^-, D_y^- and Σ_t, projected in one
        // product; the D^+ blocks follow from D^+ = -(D^-)^T
        let owned = [ProjectedKind::XMinus, ProjectedKind::YMinus, ProjectedKind::Total];
        let mut stacked = DMatrix::zeros(n, 6 * p);
        for (k, kind) in owned.into_iter().enumerate() {
            let a = kind.source(ops);
            for l in 0..p {
                let col = DVector::from_column_slice(basis.column(old_rank + l));
                stacked.set_column(2 * p * k + l, &csr_mul(a, &col));
                stacked.set_column(2 * p * k + p + l, &csr_mul_transpose(a, &col));
            }
        }
        let proj = basis.project_block(&stacked, r);
        for (k, kind) in owned.into_iter().enumerate() {
            let m = &mut self.mats[kind.index()];
            m.resize_mut(r, r, T::zero());
            for l in 0..p {
                let col = old_rank + l;
                for i in 0..r {
                    m[(i, col)] = proj[(i, 2 * p * k + l)];
                }
                for i in 0..old_rank {
                    m[(col, i)] = proj[(i, 2 * p * k + p + l)];
                }
            }
        }
        for (plus, minus) in [(ProjectedKind::XPlus, ProjectedKind::XMinus), (ProjectedKind::YPlus, ProjectedKind::YMinus)] {
            self.mats[plus.index()] = -self.mats[minus.index()].transpose();
        }
        let grow = |v: &mut DVector<T>, full: &DVector<T>| {
            let tail = basis.project_from(full.as_slice(), old_rank);
            let mut out = DVector::zeros(r);
            out.rows_mut(0, old_rank).copy_from(&v.rows(0, old_rank));
            out.rows_mut(old_rank, p).copy_from(&tail);
            *v = out;
        };
        grow(&mut self.core, core);
        if let Some(edges) = self.edges.as_mut() {
            for (e, full) in edges.iter_mut().zip([&boundary.left, &boundary.right, &boundary.bottom, &boundary.top]) {
                grow(e, full);
            }
        }
        self.rank = r;
    }

    /// Recomputes every projection directly from the basis.
    pub fn rebuild(&mut self, ops: &DiscreteOperators<T>, boundary: &BoundaryVectors<T>, core: &DVector<T>, basis: &Basis<T>) {
        let r = basis.rank();
        for kind in ProjectedKind::ALL {
            let a = kind.source(ops);
            let mut ax = DMatrix::zeros(basis.n_rows(), r);
            for i in 0..r {
                ax.set_column(i, &csr_mul(a, &DVector::from_column_slice(basis.column(i))));
            }
            self.mats[kind.index()] = basis.project_block(&ax, r);
        }
        self.core = basis.project(core.as_slice());
        if let Some(edges) = self.edges.as_mut() {
            for (e, full) in edges.iter_mut().zip([&boundary.left, &boundary.right, &boundary.bottom, &boundary.top]) {
                *e = basis.project(full.as_slice());
            }
        }
        self.rank = r;
    }

    /// `X^T (D_j + Σ_t) X` for direction `omega`.
    pub fn reduced_matrix(&self, omega: [T; 3]) -> DMatrix<T> {
        let xk = if omega[0] >= T::zero() { ProjectedKind::XMinus } else { ProjectedKind::XPlus };
        let yk = if omega[1] >= T::zero() { ProjectedKind::YMinus } else { ProjectedKind::YPlus };
        let mut m = self.get(ProjectedKind::Total).clone();
        m += self.get(xk) * omega[0];
        m += self.get(yk) * omega[1];
        m
    }

    /// `X^T (Σ_s φ + G + g_j)` for direction `omega`.
    pub fn reduced_rhs(&self, omega: [T; 3]) -> DVector<T> {
        let mut b = self.core.clone();
        if let Some(edges) = &self.edges {
            for (c, e) in BoundaryVectors::coefficients(omega).into_iter().zip(edges) {
                if c != T::zero() {
                    b.axpy(c, e, T::one());
                }
            }
        }
        b
    }
}
