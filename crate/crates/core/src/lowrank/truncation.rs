//! Truncated SVD of the angular coefficient matrix.

use nalgebra::{DMatrix, DVector};

use super::basis::Basis;
use crate::real::Real;

/// `Ψ ≈ X S V^T` with orthonormal `X` (`N_x x r`), `V` (`N_Ω x r`) and
/// nonincreasing nonnegative `S`.
#[derive(Debug, Clone)]
pub struct LowRankFactors<T: Real> {
    pub x: DMatrix<T>,
    pub s: DVector<T>,
    pub v: DMatrix<T>,
}

impl<T: Real> LowRankFactors<T> {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    /// Stored entries `r (N_x + N_Ω)`.
    pub fn dof_count(&self) -> usize {
        self.rank() * (self.x.nrows() + self.v.nrows())
    }

    /// Column `j` of `X S V^T`.
    pub fn column(&self, j: usize) -> DVector<T> {
        let coeff = DVector::from_fn(self.rank(), |i, _| self.s[i] * self.v[(j, i)]);
        &self.x * coeff
    }

    /// Columns `j0..j1` of `X S V^T`.
    pub fn columns(&self, j0: usize, j1: usize) -> DMatrix<T> {
        let sv = DMatrix::from_fn(self.rank(), j1 - j0, |i, k| self.s[i] * self.v[(j0 + k, i)]);
        &self.x * sv
    }
}

/// Smallest `r` with `Σ_{i>r} s_i / Σ_i s_i ≤ eps` for nonincreasing `s`.
/// Returns 0 when every singular value vanishes.
pub fn truncation_rank<T: Real>(s: &[T], eps: T) -> usize {
    let total = s.iter().fold(T::zero(), |a, &b| a + b);
    if total == T::zero() {
        return 0;
    }
    let mut tail = total;
    for (r, &v) in s.iter().enumerate() {
        if tail / total <= eps {
            return r;
        }
        tail -= v;
    }
    s.len()
}

/// Singular triplets of `c` sorted by decreasing singular value.
fn sorted_svd<T: Real>(c: &DMatrix<T>) -> (DMatrix<T>, Vec<T>, DMatrix<T>) {
    let svd = c.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap_or(std::cmp::Ordering::Equal));
    let s: Vec<T> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = DMatrix::from_fn(u.nrows(), order.len(), |r, k| u[(r, order[k])]);
    let v = DMatrix::from_fn(vt.ncols(), order.len(), |r, k| vt[(order[k], r)]);
    (u, s, v)
}

/// Singular values of `c`, decreasing.
pub fn singular_values<T: Real>(c: &DMatrix<T>) -> Vec<T> {
    if c.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<T> = c.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Truncated factors of `X C` with `C = U S V^T`: `X_out = X U_r`.
pub fn truncate<T: Real>(c: &DMatrix<T>, basis: &Basis<T>, eps_svd: T) -> LowRankFactors<T> {
    truncate_dense(c, &basis.matrix().into_owned(), eps_svd)
}

/// [`truncate`] with an explicit basis matrix.
pub fn truncate_dense<T: Real>(c: &DMatrix<T>, x: &DMatrix<T>, eps_svd: T) -> LowRankFactors<T> {
    if c.is_empty() {
        return LowRankFactors { x: DMatrix::zeros(x.nrows(), 0), s: DVector::zeros(0), v: DMatrix::zeros(c.ncols(), 0) };
    }
    let (u, s, v) = sorted_svd(c);
    let r = truncation_rank(&s, eps_svd);
    LowRankFactors {
        x: x * u.columns(0, r),
        s: DVector::from_column_slice(&s[..r]),
        v: v.columns(0, r).into_owned(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_rule_examples() {
        assert_eq!(truncation_rank(&[1.0, 1e-4, 1e-12], 1e-8), 2);
        assert_eq!(truncation_rank(&[1.0, 0.0, 0.0], 1e-8), 1);
        assert_eq!(truncation_rank(&[1.0, 1.0], 1e-8), 2);
        assert_eq!(truncation_rank::<f64>(&[0.0, 0.0], 1e-8), 0);
    }

    #[test]
    fn rank_one_exact() {
        let a = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let b = DVector::from_vec(vec![3.0, 1.0, 0.0, 2.0, -1.0]);
        let c = &a * b.transpose();
        let x = DMatrix::<f64>::identity(3, 3);
        let f = truncate_dense(&c, &x, 1e-8);
        assert_eq!(f.rank(), 1);
        assert!((f.columns(0, 5) - c).amax() < 1e-13);
    }

    #[test]
    fn prescribed_singular_values() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let mut rnd = |n: usize, m: usize| {
            use rand::Rng;
            DMatrix::from_fn(n, m, |_, _| rng.random::<f64>() - 0.5).qr().q()
        };
        let u = rnd(3, 3);
        let v = rnd(6, 3);
        let s = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-4, 1e-12]));
        let c = &u * s * v.transpose();
        let f = truncate_dense(&c, &DMatrix::identity(3, 3), 1e-8);
        assert_eq!(f.rank(), 2);
        assert!((f.s[0] - 1.0).abs() < 1e-14 && (f.s[1] - 1e-4).abs() < 1e-14);
        let vtv = f.v.transpose() * &f.v;
        assert!((vtv - DMatrix::identity(2, 2)).amax() < 1e-13);
    }
}
