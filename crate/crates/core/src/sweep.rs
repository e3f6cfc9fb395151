//! Transport sweeps: cell-by-cell block forward substitution of
//! `(D_j + Σ_t) ψ = b` along the upwind ordering of a direction.

use nalgebra::DVector;
use nalgebra_sparse::CsrMatrix;

use crate::dg::{DGSpace, DiscreteOperators};
use crate::error::{Error, Result};
use crate::real::Real;

/// Dense per-cell blocks of the streaming and total cross-section matrices.
///
/// For every cell the plan keeps the diagonal block of each of `D_x^-`,
/// `D_x^+`, `D_y^-`, `D_y^+`, `Σ_t` and the single off-diagonal block that
/// couples the cell to its upwind neighbour. Blocks are `s x s`, row major.
#[derive(Debug, Clone)]
pub struct SweepPlan<T> {
    nx: usize,
    ny: usize,
    s: usize,
    xm_diag: Vec<T>,
    xm_left: Vec<T>,
    xp_diag: Vec<T>,
    xp_right: Vec<T>,
    ym_diag: Vec<T>,
    ym_below: Vec<T>,
    yp_diag: Vec<T>,
    yp_above: Vec<T>,
    st_diag: Vec<T>,
}

impl<T: Real> SweepPlan<T> {
    pub fn new(space: &DGSpace<T>, ops: &DiscreteOperators<T>) -> Self {
        let mesh = space.mesh();
        let (nx, ny) = (mesh.nx(), mesh.ny());
        let s = space.dofs_per_cell();
        let nc = mesh.n_cells();
        let zeros = || vec![T::zero(); nc * s * s];
        let mut plan = Self {
            nx,
            ny,
            s,
            xm_diag: zeros(),
            xm_left: zeros(),
            xp_diag: zeros(),
            xp_right: zeros(),
            ym_diag: zeros(),
            ym_below: zeros(),
            yp_diag: zeros(),
            yp_above: zeros(),
            st_diag: zeros(),
        };
        // the quadrant structure guarantees the only off-diagonal block of each
        // row is the upwind neighbour
        let scatter = |m: &CsrMatrix<T>, diag: &mut Vec<T>, mut off: Option<&mut Vec<T>>| {
            for (i, j, &v) in m.triplet_iter() {
                let (ci, k) = (i / s, i % s);
                let (cj, l) = (j / s, j % s);
                if ci == cj {
                    diag[ci * s * s + k * s + l] += v;
                } else if let Some(buf) = off.as_mut() {
                    buf[ci * s * s + k * s + l] += v;
                }
            }
        };
        scatter(&ops.dx_minus, &mut plan.xm_diag, Some(&mut plan.xm_left));
        scatter(&ops.dx_plus, &mut plan.xp_diag, Some(&mut plan.xp_right));
        scatter(&ops.dy_minus, &mut plan.ym_diag, Some(&mut plan.ym_below));
        scatter(&ops.dy_plus, &mut plan.yp_diag, Some(&mut plan.yp_above));
        scatter(&ops.sigma_t, &mut plan.st_diag, None);
        plan
    }

    pub fn n_dofs(&self) -> usize {
        self.nx * self.ny * self.s
    }

    /// Cell visiting order for direction `omega`: rows then columns, each
    /// traversed from the inflow side.
    pub fn sweep_order(&self, omega: [T; 3]) -> Vec<usize> {
        let xs: Vec<usize> = if omega[0] >= T::zero() { (0..self.nx).collect() } else { (0..self.nx).rev().collect() };
        let ys: Vec<usize> = if omega[1] >= T::zero() { (0..self.ny).collect() } else { (0..self.ny).rev().collect() };
        let mut order = Vec::with_capacity(self.nx * self.ny);
        for &b in &ys {
            for &a in &xs {
                order.push(b * self.nx + a);
            }
        }
        order
    }

    /// Solves `(D_j + Σ_t) ψ = rhs` for direction `omega`.
    ///
    /// `angle` is only used to label a singular-block error.
    pub fn sweep(&self, angle: usize, omega: [T; 3], rhs: &DVector<T>) -> Result<DVector<T>> {
        let mut psi = DVector::zeros(rhs.len());
        self.sweep_into(angle, omega, rhs, &mut psi)?;
        Ok(psi)
    }

    pub fn sweep_into(&self, angle: usize, omega: [T; 3], rhs: &DVector<T>, psi: &mut DVector<T>) -> Result<()> {
        if rhs.len() != self.n_dofs() || psi.len() != self.n_dofs() {
            return Err(Error::InvalidArgument(format!(
                "sweep vectors must have length {}, got {} and {}",
                self.n_dofs(),
                rhs.len(),
                psi.len()
            )));
        }
        let s = self.s;
        let ss = s * s;
        let (ox, oy) = (omega[0], omega[1]);
        let x_minus = ox >= T::zero();
        let y_minus = oy >= T::zero();
        let (xd, xo) = if x_minus { (&self.xm_diag, &self.xm_left) } else { (&self.xp_diag, &self.xp_right) };
        let (yd, yo) = if y_minus { (&self.ym_diag, &self.ym_below) } else { (&self.yp_diag, &self.yp_above) };
        let mut a = vec![T::zero(); ss];
        let mut b = vec![T::zero(); s];
        let mut perm = vec![0usize; s];
        for c in self.sweep_order(omega) {
            let (ca, cb) = (c % self.nx, c / self.nx);
            let base = c * ss;
            for i in 0..ss {
                a[i] = ox * xd[base + i] + oy * yd[base + i] + self.st_diag[base + i];
            }
            b.copy_from_slice(&rhs.as_slice()[c * s..(c + 1) * s]);
            let up_x = if x_minus { ca.checked_sub(1) } else { (ca + 1 < self.nx).then_some(ca + 1) };
            if let Some(ua) = up_x {
                let uc = cb * self.nx + ua;
                for k in 0..s {
                    let mut acc = T::zero();
                    for l in 0..s {
                        acc += xo[base + k * s + l] * psi[uc * s + l];
                    }
                    b[k] -= ox * acc;
                }
            }
            let up_y = if y_minus { cb.checked_sub(1) } else { (cb + 1 < self.ny).then_some(cb + 1) };
            if let Some(ub) = up_y {
                let uc = ub * self.nx + ca;
                for k in 0..s {
                    let mut acc = T::zero();
                    for l in 0..s {
                        acc += yo[base + k * s + l] * psi[uc * s + l];
                    }
                    b[k] -= oy * acc;
                }
            }
            lu_solve_in_place(&mut a, &mut b, &mut perm, s).ok_or(Error::SingularLocalBlock { cell: c, angle })?;
            psi.as_mut_slice()[c * s..(c + 1) * s].copy_from_slice(&b);
        }
        Ok(())
    }

    /// Matrix-free `(D_j + Σ_t) v` using the stored blocks.
    pub fn apply(&self, omega: [T; 3], v: &DVector<T>) -> DVector<T> {
        let s = self.s;
        let ss = s * s;
        let (ox, oy) = (omega[0], omega[1]);
        let x_minus = ox >= T::zero();
        let y_minus = oy >= T::zero();
        let (xd, xo) = if x_minus { (&self.xm_diag, &self.xm_left) } else { (&self.xp_diag, &self.xp_right) };
        let (yd, yo) = if y_minus { (&self.ym_diag, &self.ym_below) } else { (&self.yp_diag, &self.yp_above) };
        let mut out = DVector::zeros(v.len());
        for c in 0..self.nx * self.ny {
            let (ca, cb) = (c % self.nx, c / self.nx);
            let base = c * ss;
            let up_x = if x_minus { ca.checked_sub(1) } else { (ca + 1 < self.nx).then_some(ca + 1) };
            let up_y = if y_minus { cb.checked_sub(1) } else { (cb + 1 < self.ny).then_some(cb + 1) };
            for k in 0..s {
                let mut acc = T::zero();
                for l in 0..s {
                    let blk = ox * xd[base + k * s + l] + oy * yd[base + k * s + l] + self.st_diag[base + k * s + l];
                    acc += blk * v[c * s + l];
                    if let Some(ua) = up_x {
                        acc += ox * xo[base + k * s + l] * v[(cb * self.nx + ua) * s + l];
                    }
                    if let Some(ub) = up_y {
                        acc += oy * yo[base + k * s + l] * v[(ub * self.nx + ca) * s + l];
                    }
                }
                out[c * s + k] = acc;
            }
        }
        out
    }
}

/// Gaussian elimination with partial pivoting on a row-major `n x n` block.
/// Returns `None` on a zero or non-finite pivot. `a` is destroyed and `b`
/// holds the solution.
fn lu_solve_in_place<T: Real>(a: &mut [T], b: &mut [T], perm: &mut [usize], n: usize) -> Option<()> {
    for (i, p) in perm.iter_mut().enumerate() {
        *p = i;
    }
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if !(best > T::zero()) || !best.is_finite() {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
            perm.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f != T::zero() {
                for k in col..n {
                    let t = a[col * n + k];
                    a[r * n + k] -= f * t;
                }
                let t = b[col];
                b[r] -= f * t;
            }
        }
    }
    for r in (0..n).rev() {
        let mut acc = b[r];
        for k in r + 1..n {
            acc -= a[r * n + k] * b[k];
        }
        b[r] = acc / a[r * n + r];
        if !b[r].is_finite() {
            return None;
        }
    }
    Some(())
}
