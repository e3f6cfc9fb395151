//! Diffusion correction for source iteration.
//!
//! The correction `δφ` solves `-∇·(D ∇δφ) + σ_a δφ = σ_s (φ* - φ_prev)` with
//! `D = 1 / (3 σ_t)` on the transport DG space, discretized by symmetric
//! interior penalty with homogeneous Dirichlet data imposed weakly.
//!
//! `D` is constant per cell (taken from the cell mean of `σ_t`). Face fluxes use
//! diffusivity-weighted averages, so the consistency terms and the penalty
//! `4 K (K + 1) D_face / h` both carry the harmonic mean `D_face` of the two
//! adjacent cells. On boundary faces `D_face` is the cell value.

use nalgebra::DVector;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix, CsrMatrix};

use crate::dg::{csr_mul, DGSpace, DiscreteOperators};
use crate::error::{Error, Result};
use crate::real::Real;

/// Assembled and factored diffusion correction operator.
#[derive(Debug, Clone)]
pub struct DiffusionSystem<T: Real> {
    matrix: CsrMatrix<T>,
    factor: CscCholesky<T>,
    sigma_s: CsrMatrix<T>,
    diffusivity: Vec<T>,
}

impl<T: Real> DiffusionSystem<T> {
    /// The diffusion matrix `A_diff`.
    pub fn matrix(&self) -> &CsrMatrix<T> {
        &self.matrix
    }

    /// Per-cell diffusion coefficient `1 / (3 σ̄_t)`.
    pub fn diffusivity(&self) -> &[T] {
        &self.diffusivity
    }

    /// Solves `A_diff x = rhs`.
    pub fn solve(&self, rhs: &DVector<T>) -> DVector<T> {
        let sol = self.factor.solve(rhs);
        DVector::from_column_slice(sol.as_slice())
    }

    /// Returns `δφ` with `A_diff δφ = Σ_s (φ* - φ_prev)`.
    pub fn correction(&self, phi_star: &DVector<T>, phi_prev: &DVector<T>) -> Result<DVector<T>> {
        if phi_star.len() != self.matrix.nrows() || phi_prev.len() != self.matrix.nrows() {
            return Err(Error::InvalidArgument("scalar flux length does not match diffusion system".into()));
        }
        let rhs = csr_mul(&self.sigma_s, &(phi_star - phi_prev));
        if rhs.iter().all(|v| *v == T::zero()) {
            return Ok(DVector::zeros(rhs.len()));
        }
        let out = self.solve(&rhs);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(out)
    }
}

/// Free-function form of [`DiffusionSystem::correction`].
pub fn dsa_correct<T: Real>(sys: &DiffusionSystem<T>, phi_star: &DVector<T>, phi_prev: &DVector<T>) -> Result<DVector<T>> {
    sys.correction(phi_star, phi_prev)
}

/// Per-cell diffusion coefficient from the constant-mode entry of `Σ_t`.
fn cell_diffusivity<T: Real>(space: &DGSpace<T>, ops: &DiscreteOperators<T>) -> Result<Vec<T>> {
    let mesh = space.mesh();
    let mut d = Vec::with_capacity(mesh.n_cells());
    let mut mean = vec![T::zero(); mesh.n_cells()];
    for (i, j, &v) in ops.sigma_t.triplet_iter() {
        if i == j && i % space.dofs_per_cell() == 0 {
            mean[i / space.dofs_per_cell()] = v;
        }
    }
    for (c, &st) in mean.iter().enumerate() {
        if !(st > T::zero()) {
            return Err(Error::InvalidArgument(format!("total cross section must be positive, cell {c} has mean {st:e}")));
        }
        d.push(T::one() / (T::lit(3.0) * st));
    }
    Ok(d)
}

/// One side of a face: the cell, which of its traces lies on the face, the jump
/// sign and the weight of its normal derivative in the averaged flux.
struct FaceSide<T> {
    cell: usize,
    hi: bool,
    sign: T,
    weight: T,
}

/// Assembles `A_diff` with the given per-cell diffusivity and the absorption
/// matrix `Σ_a`.
pub fn assemble_diffusion_matrix<T: Real>(space: &DGSpace<T>, diffusivity: &[T], sigma_a: &CsrMatrix<T>) -> CsrMatrix<T> {
    let mesh = space.mesh();
    let n = space.n_dofs();
    let s = space.dofs_per_cell();
    let k1 = space.degree() + 1;
    let nq = space.n_quad();
    let w = space.gauss_weights();
    let (hx, hy) = (mesh.dx(), mesh.dy());
    let two = T::lit(2.0);
    let penalty_c = T::from_count(4 * space.degree() * (space.degree() + 1));

    // 1D data of the physical orthonormal basis b_i = φ_i(ξ) / √h:
    // ∫ b_i' b_j' = (2 / h^2) Σ_q w φ_i' φ_j'
    let mut stiff_ref = vec![T::zero(); k1 * k1];
    for i in 0..k1 {
        for j in 0..k1 {
            let mut acc = T::zero();
            for q in 0..nq {
                acc += w[q] * space.ref_deriv(i, q) * space.ref_deriv(j, q);
            }
            stiff_ref[i * k1 + j] = acc;
        }
    }
    let val = |i: usize, hi: bool, h: T| space.ref_trace(i, hi) / h.sqrt();
    let der = |i: usize, hi: bool, h: T| two / h * space.ref_deriv_trace(i, hi) / h.sqrt();

    let mut coo = CooMatrix::new(n, n);
    for (i, j, &v) in sigma_a.triplet_iter() {
        coo.push(i, j, v);
    }

    for c in 0..mesh.n_cells() {
        let d = diffusivity[c];
        for k in 0..s {
            let (kx, ky) = space.local_degrees(k);
            for l in 0..s {
                let (lx, ly) = space.local_degrees(l);
                let mut v = T::zero();
                if ky == ly {
                    v += two / (hx * hx) * stiff_ref[kx * k1 + lx];
                }
                if kx == lx {
                    v += two / (hy * hy) * stiff_ref[ky * k1 + ly];
                }
                if v != T::zero() {
                    coo.push(space.dof(c, k), space.dof(c, l), d * v);
                }
            }
        }
    }

    // faces normal to `axis`; `along` indexes the grid line, `across` the cell row/column
    for axis_x in [true, false] {
        let (h, n_along, n_across) = if axis_x { (hx, mesh.nx(), mesh.ny()) } else { (hy, mesh.ny(), mesh.nx()) };
        let split = |local: usize| -> (usize, usize) {
            let (ix, iy) = space.local_degrees(local);
            if axis_x { (ix, iy) } else { (iy, ix) }
        };
        let cell_at = |along: usize, across: usize| if axis_x { mesh.cell_index(along, across) } else { mesh.cell_index(across, along) };
        for across in 0..n_across {
            for line in 0..=n_along {
                let lower = (line > 0).then(|| cell_at(line - 1, across));
                let upper = (line < n_along).then(|| cell_at(line, across));
                let (sides, d_face): (Vec<FaceSide<T>>, T) = match (lower, upper) {
                    (Some(lo), Some(up)) => {
                        let (da, db) = (diffusivity[lo], diffusivity[up]);
                        let dh = two * da * db / (da + db);
                        let half = dh / two;
                        (
                            vec![
                                FaceSide { cell: lo, hi: true, sign: T::one(), weight: half },
                                FaceSide { cell: up, hi: false, sign: -T::one(), weight: half },
                            ],
                            dh,
                        )
                    }
                    (Some(lo), None) => {
                        let d = diffusivity[lo];
                        (vec![FaceSide { cell: lo, hi: true, sign: T::one(), weight: d }], d)
                    }
                    (None, Some(up)) => {
                        let d = diffusivity[up];
                        (vec![FaceSide { cell: up, hi: false, sign: -T::one(), weight: d }], d)
                    }
                    (None, None) => unreachable!(),
                };
                let kappa = penalty_c * d_face / h;
                for a in &sides {
                    for b in &sides {
                        for k in 0..s {
                            let (ka, kc) = split(k);
                            for l in 0..s {
                                let (la, lc) = split(l);
                                if kc != lc {
                                    continue;
                                }
                                // -{D u'}[v] - {D v'}[u] + κ [u][v], with v = test k on side a, u = trial l on side b
                                let vk = val(ka, a.hi, h);
                                let ul = val(la, b.hi, h);
                                let v = -b.weight * der(la, b.hi, h) * a.sign * vk - a.weight * der(ka, a.hi, h) * b.sign * ul
                                    + kappa * a.sign * b.sign * vk * ul;
                                coo.push(space.dof(a.cell, k), space.dof(b.cell, l), v);
                            }
                        }
                    }
                }
            }
        }
    }
    CsrMatrix::from(&coo)
}

/// Assembles and factors the diffusion correction operator.
pub fn build_diffusion<T: Real>(space: &DGSpace<T>, ops: &DiscreteOperators<T>) -> Result<DiffusionSystem<T>> {
    if space.degree() == 0 {
        return Err(Error::InvalidArgument("interior penalty diffusion needs DG degree >= 1".into()));
    }
    let diffusivity = cell_diffusivity(space, ops)?;
    let matrix = assemble_diffusion_matrix(space, &diffusivity, &ops.sigma_a);
    let csc = CscMatrix::from(&matrix);
    let factor = CscCholesky::factor(&csc).map_err(|_| Error::NotPositiveDefinite)?;
    Ok(DiffusionSystem { matrix, factor, sigma_s: ops.sigma_s.clone(), diffusivity })
}
