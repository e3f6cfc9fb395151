//! Incrementally grown orthonormal spatial basis with the coefficient record
//! of every snapshot inserted into it.

use nalgebra::{DMatrix, DMatrixView, DVector};

use crate::real::Real;

/// What an insertion did to the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BasisUpdate {
    /// Columns appended by Gram–Schmidt (before any re-orthogonalization).
    pub added: usize,
    /// Snapshots that lay numerically in the existing span.
    pub dropped: usize,
    /// The basis was replaced by a Householder QR of the old basis and the new snapshots.
    pub reorthogonalized: bool,
}

/// Column-orthonormal `X` (`n x r`, column major) together with the
/// coefficients `R` of every inserted snapshot, so that `ψ_s = X R[:, s]`.
///
/// Snapshot records are stored at the length of the basis when they were
/// inserted and are zero padded on read, which keeps `R` upper triangular.
#[derive(Debug, Clone)]
pub struct Basis<T> {
    n: usize,
    rank: usize,
    data: Vec<T>,
    records: Vec<Vec<T>>,
}

impl<T: Real> Basis<T> {
    pub fn new(n: usize) -> Self {
        Self { n, rank: 0, data: Vec::new(), records: Vec::new() }
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of snapshots recorded.
    pub fn n_snapshots(&self) -> usize {
        self.records.len()
    }

    pub fn column(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn matrix(&self) -> DMatrixView<'_, T> {
        DMatrixView::from_slice(&self.data[..self.n * self.rank], self.n, self.rank)
    }

    /// Columns `from..rank` as an owned matrix.
    pub fn columns_from(&self, from: usize) -> DMatrix<T> {
        DMatrix::from_column_slice(self.n, self.rank - from, &self.data[from * self.n..self.rank * self.n])
    }

    /// `X c`.
    pub fn apply(&self, c: &[T]) -> DVector<T> {
        let mut out = DVector::zeros(self.n);
        let o = out.as_mut_slice();
        for (i, &ci) in c.iter().enumerate().take(self.rank) {
            if ci == T::zero() {
                continue;
            }
            for (acc, &x) in o.iter_mut().zip(self.column(i)) {
                *acc += ci * x;
            }
        }
        out
    }

    /// `X C` for a block of coefficient columns (rows past the rank are ignored).
    pub fn apply_block(&self, c: &DMatrix<T>) -> DMatrix<T> {
        let r = c.nrows().min(self.rank);
        self.matrix().columns(0, r) * c.rows(0, r)
    }

    /// `X[:, 0..upto]^T M`.
    pub fn project_block(&self, m: &DMatrix<T>, upto: usize) -> DMatrix<T> {
        assert!(upto <= self.rank);
        if upto == 0 {
            return DMatrix::zeros(0, m.ncols());
        }
        // (M^T X)^T keeps both operands column major
        (m.transpose() * self.matrix().columns(0, upto)).transpose()
    }

    /// `X^T v` restricted to columns `from..rank`.
    pub fn project_from(&self, v: &[T], from: usize) -> DVector<T> {
        DVector::from_iterator(self.rank - from, (from..self.rank).map(|i| dot(self.column(i), v)))
    }

    /// `X^T v`.
    pub fn project(&self, v: &[T]) -> DVector<T> {
        self.project_from(v, 0)
    }

    /// Coefficient column of snapshot `s`, padded to the current rank.
    pub fn record(&self, s: usize) -> DVector<T> {
        let r = &self.records[s];
        DVector::from_fn(self.rank, |i, _| if i < r.len() { r[i] } else { T::zero() })
    }

    /// `R` as an `r x n_snapshots` matrix.
    pub fn record_matrix(&self) -> DMatrix<T> {
        let mut m = DMatrix::zeros(self.rank, self.records.len());
        for (s, r) in self.records.iter().enumerate() {
            for (i, &v) in r.iter().enumerate() {
                m[(i, s)] = v;
            }
        }
        m
    }

    /// Appends snapshots by modified Gram–Schmidt.
    ///
    /// Each snapshot is orthogonalized against the current basis (including
    /// columns added earlier in the same call); a second pass runs when the
    /// first removes more than 30% of its norm. A snapshot whose remainder is at
    /// most `drop_tol` times its norm is recorded but does not extend the basis.
    /// Afterwards, if `|x_1 · x_r| > eps_mgs`, the basis is recomputed as the
    /// Householder QR of the previous basis and the kept snapshots and all
    /// records are transformed accordingly.
    pub fn insert(&mut self, snapshots: &[DVector<T>], eps_mgs: T, drop_tol: T) -> BasisUpdate {
        let old_rank = self.rank;
        let first_record = self.records.len();
        let mut update = BasisUpdate::default();
        let mut kept = Vec::new();
        for (idx, psi) in snapshots.iter().enumerate() {
            assert_eq!(psi.len(), self.n, "snapshot length mismatch");
            let norm0 = psi.norm();
            let mut rem = psi.clone();
            let mut coeffs = vec![T::zero(); self.rank];
            let mut before = norm0;
            for _pass in 0..2 {
                for i in 0..self.rank {
                    let col = &self.data[i * self.n..(i + 1) * self.n];
                    let h = dot(col, rem.as_slice());
                    coeffs[i] += h;
                    for (r, &x) in rem.as_mut_slice().iter_mut().zip(col) {
                        *r -= h * x;
                    }
                }
                let after = rem.norm();
                if after >= T::lit(0.7) * before {
                    break;
                }
                before = after;
            }
            let rn = rem.norm();
            if norm0 == T::zero() || rn <= drop_tol * norm0 {
                update.dropped += 1;
                self.records.push(coeffs);
                continue;
            }
            let inv = T::one() / rn;
            self.data.extend(rem.iter().map(|&v| v * inv));
            self.rank += 1;
            coeffs.push(rn);
            self.records.push(coeffs);
            update.added += 1;
            kept.push(idx);
        }

        if self.rank >= 2 && dot(self.column(0), self.column(self.rank - 1)).abs() > eps_mgs {
            self.reorthogonalize(old_rank, first_record, snapshots, &kept);
            update.reorthogonalized = true;
        }
        update
    }

    fn reorthogonalize(&mut self, old_rank: usize, first_record: usize, snapshots: &[DVector<T>], kept: &[usize]) {
        let m = old_rank + kept.len();
        let mut a = DMatrix::zeros(self.n, m);
        a.view_mut((0, 0), (self.n, old_rank))
            .copy_from(&DMatrixView::from_slice(&self.data[..self.n * old_rank], self.n, old_rank));
        for (k, &idx) in kept.iter().enumerate() {
            a.set_column(old_rank + k, &snapshots[idx]);
        }
        let qr = a.qr();
        let q = qr.q();
        let r = qr.r();
        // old records: Q^T X_old c = R[:, :old_rank] c
        for rec in &mut self.records[..first_record] {
            let mut out = vec![T::zero(); m];
            for (j, &c) in rec.iter().enumerate() {
                for (i, o) in out.iter_mut().enumerate().take(j + 1) {
                    *o += r[(i, j)] * c;
                }
            }
            *rec = out;
        }
        self.data.clear();
        self.data.extend_from_slice(q.as_slice());
        self.rank = m;
        let mut kept_iter = kept.iter().enumerate().peekable();
        for (idx, psi) in snapshots.iter().enumerate() {
            let rec = match kept_iter.peek() {
                Some(&(k, &kidx)) if kidx == idx => {
                    kept_iter.next();
                    (0..=old_rank + k).map(|i| r[(i, old_rank + k)]).collect()
                }
                _ => self.project(psi.as_slice()).as_slice().to_vec(),
            };
            self.records[first_record + idx] = rec;
        }
    }

    /// `‖X^T X - I‖_F`.
    pub fn orthogonality_error(&self) -> T {
        let x = self.matrix();
        let g = x.transpose() * x;
        (g - DMatrix::identity(self.rank, self.rank)).norm()
    }
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [T::zero(); 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail = ra.iter().zip(rb).fold(T::zero(), |s, (&x, &y)| s + x * y);
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_vec(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5)
    }

    #[test]
    fn orthogonal_snapshots_into_empty_basis() {
        let mut b = Basis::<f64>::new(4);
        let s = vec![
            DVector::from_vec(vec![2.0, 0.0, 0.0, 0.0]),
            DVector::from_vec(vec![0.0, 0.0, 3.0, 0.0]),
        ];
        let u = b.insert(&s, 1e-10, 1e-12);
        assert_eq!(u, BasisUpdate { added: 2, dropped: 0, reorthogonalized: false });
        assert_eq!(b.column(0), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(b.column(1), &[0.0, 0.0, 1.0, 0.0]);
        let r = b.record_matrix();
        assert_eq!(r, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]));
    }

    #[test]
    fn dependent_snapshot_is_dropped() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut b = Basis::<f64>::new(10);
        let a = random_vec(&mut rng, 10);
        let c = random_vec(&mut rng, 10);
        b.insert(&[a.clone(), c.clone()], 1e-10, 1e-12);
        let combo = &a * 0.3 - &c * 2.0;
        let u = b.insert(&[combo.clone()], 1e-10, 1e-12);
        assert_eq!(u.dropped, 1);
        assert_eq!(b.rank(), 2);
        assert!((b.apply(b.record(2).as_slice()) - combo).norm() < 1e-13);
    }

    #[test]
    fn records_reproduce_snapshots_and_basis_matches_reference_qr() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 600;
        let mut b = Basis::<f64>::new(n);
        let mut all = Vec::new();
        for _ in 0..500 {
            let s = random_vec(&mut rng, n);
            all.push(s.clone());
            b.insert(&[s], 1e-10, 1e-12);
        }
        assert_eq!(b.rank(), 500);
        assert!(b.orthogonality_error() < 1e-10);
        let snaps = DMatrix::from_columns(&all);
        let xr = b.matrix() * b.record_matrix();
        assert!((&xr - &snaps).norm() <= 1e-10 * snaps.norm());
        let q = snaps.qr().q();
        for i in 0..500 {
            let mine = DVector::from_column_slice(b.column(i));
            let theirs = q.column(i).into_owned();
            let d = (&mine - &theirs).amax().min((&mine + &theirs).amax());
            assert!(d < 1e-10, "column {i} differs by {d}");
        }
    }

    #[test]
    fn reorthogonalization_keeps_records_consistent() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 40;
        let mut b = Basis::<f64>::new(n);
        let mut all = Vec::new();
        let base = random_vec(&mut rng, n);
        let mut saw_reorth = false;
        for k in 0..30 {
            // nearly parallel snapshots stress Gram–Schmidt
            let s = &base + random_vec(&mut rng, n) * 1e-6 * (k as f64 + 1.0);
            all.push(s.clone());
            // a tiny threshold forces the full QR path
            let u = b.insert(&[s], 1e-17, 1e-14);
            saw_reorth |= u.reorthogonalized;
        }
        assert!(saw_reorth);
        assert!(b.orthogonality_error() < 1e-10);
        let snaps = DMatrix::from_columns(&all);
        let xr = b.matrix() * b.record_matrix();
        assert!((&xr - &snaps).norm() <= 1e-9 * snaps.norm());
        let r = b.record_matrix();
        for j in 0..r.ncols() {
            for i in (j + 1)..r.nrows() {
                assert!(r[(i, j)].abs() < 1e-9 * snaps.norm(), "R not upper triangular at ({i},{j})");
            }
        }
    }
}
