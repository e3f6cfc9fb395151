//! Upwind discontinuous Galerkin discretization of the streaming and collision
//! operators on a Cartesian mesh.
//!
//! Each cell carries the tensor product of orthonormal Legendre polynomials of
//! degree `K` in each coordinate, so the global mass matrix is the identity and
//! DOF vectors can be compared with plain Euclidean norms. DOFs are numbered cell
//! major: `dof = cell * s + ix + (K + 1) * iy` with `s = (K + 1)^2`.
//!
//! Streaming matrices follow the upwind weak form. For a face with left/lower
//! trace `-` and right/upper trace `+`,
//!
//! ```text
//! D_x^∓(k, l) = -∫_T ∂_x η_k η_l  -  Σ_faces ∫ (η_k^+ - η_k^-) η_l^∓
//! ```
//!
//! and likewise in y. The sum runs over every grid line, boundary lines
//! included, which makes `D_x^+ = -(D_x^-)^T` exactly.

use nalgebra::DVector;
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::error::{Error, Result};
use crate::mesh::SpatialMesh;
use crate::quadrature::gauss_legendre;
use crate::real::Real;

/// Local polynomial space on every cell of a mesh, with the quadrature used to
/// assemble it.
#[derive(Debug, Clone)]
pub struct DGSpace<T> {
    mesh: SpatialMesh<T>,
    degree: usize,
    /// Gauss nodes/weights on [-1, 1] with `degree + 2` points.
    gauss_nodes: Vec<T>,
    gauss_weights: Vec<T>,
    /// `phi_i(xi_q)` of the reference orthonormal Legendre basis (w.r.t. the mean on [-1,1]).
    values: Vec<Vec<T>>,
    derivs: Vec<Vec<T>>,
    /// `phi_i(-1)` and `phi_i(+1)`.
    trace_lo: Vec<T>,
    trace_hi: Vec<T>,
}

impl<T: Real> DGSpace<T> {
    /// Builds the space of degree `degree >= 1`.
    ///
    /// Piecewise constants lose the diffusion limit of the upwind scheme; use
    /// [`DGSpace::with_any_degree`] to build one anyway.
    pub fn new(mesh: SpatialMesh<T>, degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidArgument(
                "DG degree 0 is not asymptotic preserving; use degree >= 1".into(),
            ));
        }
        Ok(Self::with_any_degree(mesh, degree))
    }

    pub fn with_any_degree(mesh: SpatialMesh<T>, degree: usize) -> Self {
        let n_q = degree + 2;
        let (gauss_nodes, gauss_weights) = gauss_legendre::<T>(n_q).expect("n_q > 0");
        let eval = |i: usize, x: T| -> (T, T) {
            let (p, d) = legendre_and_derivative(i, x);
            let scale = T::from_count(2 * i + 1).sqrt();
            (scale * p, scale * d)
        };
        let mut values = Vec::with_capacity(degree + 1);
        let mut derivs = Vec::with_capacity(degree + 1);
        let mut trace_lo = Vec::with_capacity(degree + 1);
        let mut trace_hi = Vec::with_capacity(degree + 1);
        for i in 0..=degree {
            let (v, d): (Vec<T>, Vec<T>) = gauss_nodes.iter().map(|&x| eval(i, x)).unzip();
            values.push(v);
            derivs.push(d);
            trace_lo.push(eval(i, -T::one()).0);
            trace_hi.push(eval(i, T::one()).0);
        }
        Self { mesh, degree, gauss_nodes, gauss_weights, values, derivs, trace_lo, trace_hi }
    }

    pub fn mesh(&self) -> &SpatialMesh<T> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_asymptotic_preserving(&self) -> bool {
        self.degree >= 1
    }

    /// Number of DOFs per cell, `(K + 1)^2`.
    pub fn dofs_per_cell(&self) -> usize {
        (self.degree + 1) * (self.degree + 1)
    }

    /// Total number of spatial DOFs.
    pub fn n_dofs(&self) -> usize {
        self.mesh.n_cells() * self.dofs_per_cell()
    }

    #[inline]
    pub fn dof(&self, cell: usize, local: usize) -> usize {
        cell * self.dofs_per_cell() + local
    }

    /// Splits a local index into its `(ix, iy)` polynomial degrees.
    #[inline]
    pub fn local_degrees(&self, local: usize) -> (usize, usize) {
        (local % (self.degree + 1), local / (self.degree + 1))
    }

    /// Number of Gauss points per direction used for assembly.
    pub fn n_quad(&self) -> usize {
        self.gauss_nodes.len()
    }

    /// Physical coordinates of the tensor Gauss point `(qx, qy)` in `cell`.
    pub fn quad_point(&self, cell: usize, qx: usize, qy: usize) -> (T, T) {
        let (x0, x1, y0, y1) = self.mesh.cell_bounds(cell);
        let half = T::lit(0.5);
        let x = (x0 + x1) * half + (x1 - x0) * half * self.gauss_nodes[qx];
        let y = (y0 + y1) * half + (y1 - y0) * half * self.gauss_nodes[qy];
        (x, y)
    }

    /// Evaluates basis function `local` of `cell` at a physical point.
    ///
    /// Points outside the cell evaluate the polynomial extension; the caller is
    /// responsible for support.
    pub fn eval_basis(&self, cell: usize, local: usize, x: T, y: T) -> T {
        let (x0, x1, y0, y1) = self.mesh.cell_bounds(cell);
        let hx = x1 - x0;
        let hy = y1 - y0;
        let two = T::lit(2.0);
        let xi = (two * x - x0 - x1) / hx;
        let eta = (two * y - y0 - y1) / hy;
        let (ix, iy) = self.local_degrees(local);
        let px = legendre_and_derivative(ix, xi).0 * T::from_count(2 * ix + 1).sqrt();
        let py = legendre_and_derivative(iy, eta).0 * T::from_count(2 * iy + 1).sqrt();
        px * py / (hx * hy).sqrt()
    }

    /// Evaluates a DOF vector at a point of `cell`.
    pub fn eval_field(&self, coeffs: &DVector<T>, cell: usize, x: T, y: T) -> T {
        (0..self.dofs_per_cell())
            .map(|l| coeffs[self.dof(cell, l)] * self.eval_basis(cell, l, x, y))
            .fold(T::zero(), |a, b| a + b)
    }

    /// Cell mean of a DOF vector.
    pub fn cell_mean(&self, coeffs: &DVector<T>, cell: usize) -> T {
        let (x0, x1, y0, y1) = self.mesh.cell_bounds(cell);
        coeffs[self.dof(cell, 0)] / ((x1 - x0) * (y1 - y0)).sqrt()
    }

    /// Local mass matrix of `cell` computed by quadrature, row major `s x s`.
    pub fn cell_mass_matrix(&self, cell: usize) -> Vec<T> {
        self.weighted_cell_block(cell, &|_, _| T::one())
    }

    /// `∫_T w η_k η_l` for all local pairs, row major.
    fn weighted_cell_block(&self, cell: usize, weight: &dyn Fn(T, T) -> T) -> Vec<T> {
        let s = self.dofs_per_cell();
        let nq = self.n_quad();
        let quarter = T::lit(0.25);
        let mut block = vec![T::zero(); s * s];
        for qy in 0..nq {
            for qx in 0..nq {
                let (x, y) = self.quad_point(cell, qx, qy);
                let w = self.gauss_weights[qx] * self.gauss_weights[qy] * quarter * weight(x, y);
                for k in 0..s {
                    let (kx, ky) = self.local_degrees(k);
                    let vk = self.values[kx][qx] * self.values[ky][qy];
                    for l in 0..s {
                        let (lx, ly) = self.local_degrees(l);
                        block[k * s + l] += w * vk * self.values[lx][qx] * self.values[ly][qy];
                    }
                }
            }
        }
        block
    }

    pub(crate) fn gauss_weights(&self) -> &[T] {
        &self.gauss_weights
    }

    pub(crate) fn gauss_nodes(&self) -> &[T] {
        &self.gauss_nodes
    }

    /// Reference value `phi_i(xi_q)`.
    pub(crate) fn ref_value(&self, i: usize, q: usize) -> T {
        self.values[i][q]
    }

    /// Reference derivative `phi_i'(xi_q)`.
    pub(crate) fn ref_deriv(&self, i: usize, q: usize) -> T {
        self.derivs[i][q]
    }

    /// Reference trace at `-1` (`hi == false`) or `+1`.
    pub(crate) fn ref_trace(&self, i: usize, hi: bool) -> T {
        if hi {
            self.trace_hi[i]
        } else {
            self.trace_lo[i]
        }
    }

    /// Reference derivative trace at `-1` (`hi == false`) or `+1`.
    pub(crate) fn ref_deriv_trace(&self, i: usize, hi: bool) -> T {
        let x = if hi { T::one() } else { -T::one() };
        legendre_and_derivative(i, x).1 * T::from_count(2 * i + 1).sqrt()
    }
}

/// Returns `(P_n(x), P_n'(x))`, valid on the closed interval.
pub(crate) fn legendre_and_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    if n == 0 {
        return (T::one(), T::zero());
    }
    let mut p_prev = T::one();
    let mut p = x;
    let mut d_prev = T::zero();
    let mut d = T::one();
    for k in 1..n {
        let kf = T::from_count(k);
        let a = (kf + kf + T::one()) / (kf + T::one());
        let b = kf / (kf + T::one());
        let p_next = a * x * p - b * p_prev;
        let d_next = a * (p + x * d) - b * d_prev;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Coordinate direction of a streaming operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Global sparse operators of the discrete transport system.
#[derive(Debug, Clone)]
pub struct DiscreteOperators<T: Real> {
    pub dx_minus: CsrMatrix<T>,
    pub dx_plus: CsrMatrix<T>,
    pub dy_minus: CsrMatrix<T>,
    pub dy_plus: CsrMatrix<T>,
    pub sigma_s: CsrMatrix<T>,
    pub sigma_t: CsrMatrix<T>,
    pub sigma_a: CsrMatrix<T>,
}

impl<T: Real> DiscreteOperators<T> {
    pub fn n_dofs(&self) -> usize {
        self.sigma_t.nrows()
    }

    /// Streaming matrix for one axis and upwind side (`minus == true` selects `D^-`).
    pub fn streaming(&self, axis: Axis, minus: bool) -> &CsrMatrix<T> {
        match (axis, minus) {
            (Axis::X, true) => &self.dx_minus,
            (Axis::X, false) => &self.dx_plus,
            (Axis::Y, true) => &self.dy_minus,
            (Axis::Y, false) => &self.dy_plus,
        }
    }

    /// Quadrant-selected streaming combination `D_j` for direction `omega`.
    pub fn upwind(&self, omega: [T; 3]) -> UpwindOperator<'_, T> {
        UpwindOperator { ops: self, omega_x: omega[0], omega_y: omega[1] }
    }
}

/// Lazily combined `D_j = Ω_x D_x^± + Ω_y D_y^±`, with `D^-` chosen for a
/// nonnegative direction component and `D^+` otherwise.
#[derive(Debug, Clone, Copy)]
pub struct UpwindOperator<'a, T: Real> {
    ops: &'a DiscreteOperators<T>,
    omega_x: T,
    omega_y: T,
}

impl<'a, T: Real> UpwindOperator<'a, T> {
    pub fn x_minus(&self) -> bool {
        self.omega_x >= T::zero()
    }

    pub fn y_minus(&self) -> bool {
        self.omega_y >= T::zero()
    }

    pub fn x_matrix(&self) -> &'a CsrMatrix<T> {
        self.ops.streaming(Axis::X, self.x_minus())
    }

    pub fn y_matrix(&self) -> &'a CsrMatrix<T> {
        self.ops.streaming(Axis::Y, self.y_minus())
    }

    pub fn omega_x(&self) -> T {
        self.omega_x
    }

    pub fn omega_y(&self) -> T {
        self.omega_y
    }

    /// `D_j v`.
    pub fn apply(&self, v: &DVector<T>) -> DVector<T> {
        let mut out = DVector::zeros(v.len());
        csr_axpy(self.x_matrix(), self.omega_x, v, &mut out);
        csr_axpy(self.y_matrix(), self.omega_y, v, &mut out);
        out
    }

    /// `(D_j + Σ_t) v`.
    pub fn apply_with_total(&self, v: &DVector<T>) -> DVector<T> {
        let mut out = self.apply(v);
        csr_axpy(&self.ops.sigma_t, T::one(), v, &mut out);
        out
    }

    /// Explicitly assembled `D_j` (plus `Σ_t` when `with_total`).
    pub fn assemble(&self, with_total: bool) -> CsrMatrix<T> {
        let n = self.ops.n_dofs();
        let mut coo = CooMatrix::new(n, n);
        let mut push = |m: &CsrMatrix<T>, scale: T| {
            for (i, j, &v) in m.triplet_iter() {
                coo.push(i, j, scale * v);
            }
        };
        push(self.x_matrix(), self.omega_x);
        push(self.y_matrix(), self.omega_y);
        if with_total {
            push(&self.ops.sigma_t, T::one());
        }
        CsrMatrix::from(&coo)
    }
}

/// `out += alpha * m * v`.
pub fn csr_axpy<T: Real>(m: &CsrMatrix<T>, alpha: T, v: &DVector<T>, out: &mut DVector<T>) {
    let offsets = m.row_offsets();
    let cols = m.col_indices();
    let vals = m.values();
    for i in 0..m.nrows() {
        let mut acc = T::zero();
        for idx in offsets[i]..offsets[i + 1] {
            acc += vals[idx] * v[cols[idx]];
        }
        out[i] += alpha * acc;
    }
}

/// `m * v`.
pub fn csr_mul<T: Real>(m: &CsrMatrix<T>, v: &DVector<T>) -> DVector<T> {
    let mut out = DVector::zeros(m.nrows());
    csr_axpy(m, T::one(), v, &mut out);
    out
}

/// `m^T * v`.
pub fn csr_mul_transpose<T: Real>(m: &CsrMatrix<T>, v: &DVector<T>) -> DVector<T> {
    let mut out = DVector::zeros(m.ncols());
    for (i, j, &val) in m.triplet_iter() {
        out[j] += val * v[i];
    }
    out
}

/// Assembles all streaming and collision matrices.
///
/// Cross sections are sampled at the `(K + 2)^2` Gauss points of each cell;
/// a material interface that does not coincide with grid lines is smeared over
/// the cell containing it.
pub fn assemble_operators<T: Real>(
    space: &DGSpace<T>,
    sigma_s: &dyn Fn(T, T) -> T,
    sigma_a: &dyn Fn(T, T) -> T,
) -> Result<DiscreteOperators<T>> {
    let mesh = space.mesh();
    let n = space.n_dofs();
    let s = space.dofs_per_cell();
    let nq = space.n_quad();

    for c in 0..mesh.n_cells() {
        for qy in 0..nq {
            for qx in 0..nq {
                let (x, y) = space.quad_point(c, qx, qy);
                let (ss, sa) = (sigma_s(x, y), sigma_a(x, y));
                if !(ss >= T::zero()) || !(sa >= T::zero()) {
                    return Err(Error::InvalidArgument(format!(
                        "negative or NaN cross section at ({:e}, {:e}): sigma_s={:e}, sigma_a={:e}",
                        x, y, ss, sa
                    )));
                }
            }
        }
    }

    let mut coo_s = CooMatrix::new(n, n);
    let mut coo_a = CooMatrix::new(n, n);
    let mut coo_t = CooMatrix::new(n, n);
    for c in 0..mesh.n_cells() {
        let bs = space.weighted_cell_block(c, sigma_s);
        let ba = space.weighted_cell_block(c, sigma_a);
        for k in 0..s {
            for l in 0..s {
                let (i, j) = (space.dof(c, k), space.dof(c, l));
                let (vs, va) = (bs[k * s + l], ba[k * s + l]);
                coo_s.push(i, j, vs);
                coo_a.push(i, j, va);
                coo_t.push(i, j, vs + va);
            }
        }
    }

    Ok(DiscreteOperators {
        dx_minus: streaming_matrix(space, Axis::X, true),
        dx_plus: streaming_matrix(space, Axis::X, false),
        dy_minus: streaming_matrix(space, Axis::Y, true),
        dy_plus: streaming_matrix(space, Axis::Y, false),
        sigma_s: CsrMatrix::from(&coo_s),
        sigma_t: CsrMatrix::from(&coo_t),
        sigma_a: CsrMatrix::from(&coo_a),
    })
}

fn streaming_matrix<T: Real>(space: &DGSpace<T>, axis: Axis, minus: bool) -> CsrMatrix<T> {
    let mesh = space.mesh();
    let n = space.n_dofs();
    let s = space.dofs_per_cell();
    let nq = space.n_quad();
    let (h_along, n_along, n_across) = match axis {
        Axis::X => (mesh.dx(), mesh.nx(), mesh.ny()),
        Axis::Y => (mesh.dy(), mesh.ny(), mesh.nx()),
    };
    // (derivative degree along axis, value degree across axis)
    let split = |local: usize| -> (usize, usize) {
        let (ix, iy) = space.local_degrees(local);
        match axis {
            Axis::X => (ix, iy),
            Axis::Y => (iy, ix),
        }
    };
    let cell_at = |along: usize, across: usize| -> usize {
        match axis {
            Axis::X => mesh.cell_index(along, across),
            Axis::Y => mesh.cell_index(across, along),
        }
    };

    let mut coo = CooMatrix::new(n, n);

    // volume: -∫ ∂η_k η_l = -(1 / h) Σ_q w_q φ'_k(q) φ_l(q) · δ(across)
    let mut vol = vec![T::zero(); s * s];
    for k in 0..s {
        let (ka, kc) = split(k);
        for l in 0..s {
            let (la, lc) = split(l);
            if kc != lc {
                continue;
            }
            let mut acc = T::zero();
            for q in 0..nq {
                acc += space.gauss_weights()[q] * space.ref_deriv(ka, q) * space.ref_value(la, q);
            }
            vol[k * s + l] = -acc / h_along;
        }
    }
    for c in 0..mesh.n_cells() {
        for k in 0..s {
            for l in 0..s {
                let v = vol[k * s + l];
                if v != T::zero() {
                    coo.push(space.dof(c, k), space.dof(c, l), v);
                }
            }
        }
    }

    // faces: -∫ (η_k^+ - η_k^-) η_l^{side}, on grid lines 0..=n_along along the axis.
    // With orthonormal y-factors the face integral is δ(across) φ_k(trace) φ_l(trace) / h.
    for across in 0..n_across {
        for line in 0..=n_along {
            let lower = (line > 0).then(|| cell_at(line - 1, across));
            let upper = (line < n_along).then(|| cell_at(line, across));
            let trial_cell = if minus { lower } else { upper };
            let Some(trial_cell) = trial_cell else { continue };
            // trial evaluated at the hi trace of the lower cell or the lo trace of the upper cell
            let trial_hi = minus;
            for (test_cell, test_hi, sign) in [(upper, false, -T::one()), (lower, true, T::one())] {
                let Some(test_cell) = test_cell else { continue };
                for k in 0..s {
                    let (ka, kc) = split(k);
                    let tk = space.ref_trace(ka, test_hi);
                    for l in 0..s {
                        let (la, lc) = split(l);
                        if kc != lc {
                            continue;
                        }
                        let v = sign * tk * space.ref_trace(la, trial_hi) / h_along;
                        coo.push(space.dof(test_cell, k), space.dof(trial_cell, l), v);
                    }
                }
            }
        }
    }
    CsrMatrix::from(&coo)
}

/// `G(k) = ∫ G η_k`, by `(K + 2)^2`-point Gauss quadrature per cell.
pub fn project_source<T: Real>(space: &DGSpace<T>, source: &dyn Fn(T, T) -> T) -> DVector<T> {
    let mesh = space.mesh();
    let s = space.dofs_per_cell();
    let nq = space.n_quad();
    let mut out = DVector::zeros(space.n_dofs());
    let w = space.gauss_weights();
    for c in 0..mesh.n_cells() {
        let (x0, x1, y0, y1) = mesh.cell_bounds(c);
        // ∫_T f η = (hx hy / 4) Σ w w f φ φ / sqrt(hx hy)
        let scale = ((x1 - x0) * (y1 - y0)).sqrt() * T::lit(0.25);
        for qy in 0..nq {
            for qx in 0..nq {
                let (x, y) = space.quad_point(c, qx, qy);
                let f = source(x, y);
                if f == T::zero() {
                    continue;
                }
                let wf = w[qx] * w[qy] * scale * f;
                for l in 0..s {
                    let (lx, ly) = space.local_degrees(l);
                    out[space.dof(c, l)] += wf * space.ref_value(lx, qx) * space.ref_value(ly, qy);
                }
            }
        }
    }
    out
}

/// Inflow traces `∫_edge g η_k` on the four sides of the domain.
///
/// The boundary vector of direction `Ω` is
/// `max(Ω_x,0) left - min(Ω_x,0) right + max(Ω_y,0) bottom - min(Ω_y,0) top`;
/// each term is the inflow flux moved to the right-hand side.
#[derive(Debug, Clone)]
pub struct BoundaryVectors<T: Real> {
    pub left: DVector<T>,
    pub right: DVector<T>,
    pub bottom: DVector<T>,
    pub top: DVector<T>,
    zero: bool,
}

impl<T: Real> BoundaryVectors<T> {
    pub fn zero(n_dofs: usize) -> Self {
        let z = DVector::zeros(n_dofs);
        Self { left: z.clone(), right: z.clone(), bottom: z.clone(), top: z, zero: true }
    }

    /// Projects the inflow function `g(x, y)` onto the edge traces.
    pub fn assemble(space: &DGSpace<T>, g: &dyn Fn(T, T) -> T) -> Self {
        let mesh = space.mesh();
        let n = space.n_dofs();
        let s = space.dofs_per_cell();
        let nq = space.n_quad();
        let w = space.gauss_weights();
        let half = T::lit(0.5);
        let (xl, xr, yb, yt) = mesh.bounds();
        let mut out = Self::zero(n);

        // vertical sides: x = const, integrate along y over cells of column 0 or nx-1
        for (col, x_edge, hi, target) in [(0usize, xl, false, 0usize), (mesh.nx() - 1, xr, true, 1usize)] {
            for b in 0..mesh.ny() {
                let c = mesh.cell_index(col, b);
                let (x0, x1, y0, y1) = mesh.cell_bounds(c);
                let hx = x1 - x0;
                let hy = y1 - y0;
                for q in 0..nq {
                    let y = (y0 + y1) * half + hy * half * space.gauss_nodes()[q];
                    let gv = g(x_edge, y);
                    if gv == T::zero() {
                        continue;
                    }
                    // ∫ g η dy = (hy/2) Σ w g φ_x(trace) φ_y(q) / sqrt(hx hy)
                    let wq = w[q] * hy * half * gv / (hx * hy).sqrt();
                    for l in 0..s {
                        let (lx, ly) = space.local_degrees(l);
                        let v = wq * space.ref_trace(lx, hi) * space.ref_value(ly, q);
                        let vec = if target == 0 { &mut out.left } else { &mut out.right };
                        vec[space.dof(c, l)] += v;
                        out.zero = false;
                    }
                }
            }
        }
        for (row, y_edge, hi, target) in [(0usize, yb, false, 2usize), (mesh.ny() - 1, yt, true, 3usize)] {
            for a in 0..mesh.nx() {
                let c = mesh.cell_index(a, row);
                let (x0, x1, y0, y1) = mesh.cell_bounds(c);
                let hx = x1 - x0;
                let hy = y1 - y0;
                for q in 0..nq {
                    let x = (x0 + x1) * half + hx * half * space.gauss_nodes()[q];
                    let gv = g(x, y_edge);
                    if gv == T::zero() {
                        continue;
                    }
                    let wq = w[q] * hx * half * gv / (hx * hy).sqrt();
                    for l in 0..s {
                        let (lx, ly) = space.local_degrees(l);
                        let v = wq * space.ref_value(lx, q) * space.ref_trace(ly, hi);
                        let vec = if target == 2 { &mut out.bottom } else { &mut out.top };
                        vec[space.dof(c, l)] += v;
                        out.zero = false;
                    }
                }
            }
        }
        out
    }

    /// True when all inflow data vanish.
    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Coefficients `(left, right, bottom, top)` multiplying the edge vectors.
    pub fn coefficients(omega: [T; 3]) -> [T; 4] {
        let z = T::zero();
        [omega[0].max(z), -omega[0].min(z), omega[1].max(z), -omega[1].min(z)]
    }

    /// `g_j^bc` for direction `omega`.
    pub fn for_direction(&self, omega: [T; 3]) -> DVector<T> {
        let mut out = DVector::zeros(self.left.len());
        self.add_to(omega, &mut out);
        out
    }

    /// `out += g_j^bc`.
    pub fn add_to(&self, omega: [T; 3], out: &mut DVector<T>) {
        if self.zero {
            return;
        }
        let [cl, cr, cb, ct] = Self::coefficients(omega);
        for (c, v) in [(cl, &self.left), (cr, &self.right), (cb, &self.bottom), (ct, &self.top)] {
            if c != T::zero() {
                out.axpy(c, v, T::one());
            }
        }
    }
}
