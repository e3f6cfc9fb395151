//! Chebyshev–Legendre product quadrature on the unit sphere.
//!
//! The rule `CL(n_theta, n_omega_z)` is the tensor product of an `n_theta`-point
//! midpoint rule in azimuth and an `n_omega_z`-point Gauss–Legendre rule in the
//! polar cosine. Weights are normalized to sum to one, so the scalar flux is a
//! plain weighted sum of angular fluxes.

use crate::error::{Error, Result};
use crate::real::Real;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
///
/// Weights are the classical ones (summing to 2). Nodes are found by Newton
/// iteration on `P_n`; iteration stops once the update falls below `1e-15` (or a
/// few ulps for lower precision types).
pub fn gauss_legendre<T: Real>(n: usize) -> Result<(Vec<T>, Vec<T>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("Gauss-Legendre rule needs at least one node".into()));
    }
    let tol = T::lit(1e-15).max(T::lit(8.0) * T::epsilon());
    let one = T::one();
    let two = T::lit(2.0);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    // roots are symmetric; solve for the positive half and mirror
    let half = n.div_ceil(2);
    for i in 0..half {
        let guess = (T::pi() * (T::from_count(i) + T::lit(0.75)) / (T::from_count(n) + T::lit(0.5))).cos();
        let mut x = guess;
        let mut dp = one;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= tol {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = two / ((one - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    Ok((nodes, weights))
}

/// Returns `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p_prev = T::one();
    let mut p = x;
    if n == 0 {
        return (T::one(), T::zero());
    }
    for k in 1..n {
        let kf = T::from_count(k);
        let next = ((kf + kf + T::one()) * x * p - kf * p_prev) / (kf + T::one());
        p_prev = p;
        p = next;
    }
    let nf = T::from_count(n);
    let d = nf * (x * p - p_prev) / (x * x - T::one());
    (p, d)
}

/// Discrete ordinates set with normalized weights.
#[derive(Debug, Clone)]
pub struct AngularQuadrature<T> {
    directions: Vec<[T; 3]>,
    weights: Vec<T>,
    n_theta: usize,
    n_omega_z: usize,
}

impl<T: Real> AngularQuadrature<T> {
    /// Builds `CL(n_theta, n_omega_z)`.
    ///
    /// Direction `j = j1 * n_omega_z + j2` (zero based) pairs azimuth node `j1` with
    /// polar node `j2`.
    pub fn chebyshev_legendre(n_theta: usize, n_omega_z: usize) -> Result<Self> {
        if n_theta == 0 || n_omega_z == 0 {
            return Err(Error::InvalidArgument(format!(
                "quadrature orders must be positive, got CL({n_theta}, {n_omega_z})"
            )));
        }
        let (z_nodes, z_weights) = gauss_legendre::<T>(n_omega_z)?;
        let half = T::lit(0.5);
        let w_theta = T::one() / T::from_count(n_theta);
        let mut directions = Vec::with_capacity(n_theta * n_omega_z);
        let mut weights = Vec::with_capacity(n_theta * n_omega_z);
        for j1 in 1..=n_theta {
            let theta = T::two_pi() * T::from_count(j1) / T::from_count(n_theta) - T::pi() / T::from_count(n_theta);
            let (sin_t, cos_t) = theta.sin_cos();
            for (&z, &wz) in z_nodes.iter().zip(&z_weights) {
                let rho = (T::one() - z * z).sqrt();
                directions.push([cos_t * rho, sin_t * rho, z]);
                weights.push(w_theta * wz * half);
            }
        }
        Ok(Self { directions, weights, n_theta, n_omega_z })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_omega_z(&self) -> usize {
        self.n_omega_z
    }

    pub fn direction(&self, j: usize) -> [T; 3] {
        self.directions[j]
    }

    pub fn directions(&self) -> &[[T; 3]] {
        &self.directions
    }

    pub fn weight(&self, j: usize) -> T {
        self.weights[j]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Weighted sum `Σ_j ω_j f(Ω_j)`.
    pub fn integrate(&self, mut f: impl FnMut([T; 3]) -> T) -> T {
        self.directions
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&d, &w)| acc + w * f(d))
    }

    /// Index of the node equal to `-Ω_j` within `tol`, if any.
    pub fn antipode(&self, j: usize, tol: T) -> Option<usize> {
        let [x, y, z] = self.directions[j];
        self.directions
            .iter()
            .position(|&[a, b, c]| (a + x).abs() <= tol && (b + y).abs() <= tol && (c + z).abs() <= tol)
    }
}

/// Builds `CL(n_theta, n_omega_z)`; see [`AngularQuadrature::chebyshev_legendre`].
pub fn build_cl_quadrature<T: Real>(n_theta: usize, n_omega_z: usize) -> Result<AngularQuadrature<T>> {
    AngularQuadrature::chebyshev_legendre(n_theta, n_omega_z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial(n: i64) -> f64 {
        if n <= 0 {
            1.0
        } else {
            n as f64 * double_factorial(n - 2)
        }
    }

    /// `(1/4π)∫ x^a y^b z^c dΩ` in closed form.
    fn sphere_moment(a: i64, b: i64, c: i64) -> f64 {
        if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
            return 0.0;
        }
        double_factorial(a - 1) * double_factorial(b - 1) * double_factorial(c - 1) / double_factorial(a + b + c + 1)
    }

    #[test]
    fn gauss_legendre_integrates_to_degree_2n_minus_1() {
        for n in 1..=12usize {
            let (x, w) = gauss_legendre::<f64>(n).unwrap();
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(&x, &w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n={n} deg={deg} err={}", q - exact);
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn gauss_legendre_high_order_weights_sum() {
        let (_, w) = gauss_legendre::<f64>(64).unwrap();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn zero_counts_rejected() {
        assert!(build_cl_quadrature::<f64>(0, 4).is_err());
        assert!(build_cl_quadrature::<f64>(8, 0).is_err());
    }

    #[test]
    fn cl_2_1_closed_form() {
        let q = build_cl_quadrature::<f64>(2, 1).unwrap();
        assert_eq!(q.len(), 2);
        let d0 = q.direction(0);
        let d1 = q.direction(1);
        assert!(d0[0].abs() < 1e-15 && (d0[1] - 1.0).abs() < 1e-15 && d0[2] == 0.0);
        assert!(d1[0].abs() < 1e-15 && (d1[1] + 1.0).abs() < 1e-15 && d1[2] == 0.0);
        assert!((q.weight(0) - 0.5).abs() < 1e-16 && (q.weight(1) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn cl_8_4_basic_invariants() {
        let q = build_cl_quadrature::<f64>(8, 4).unwrap();
        assert_eq!(q.len(), 32);
        assert!((q.weights().iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(q.weights().iter().all(|&w| w > 0.0));
        for &[x, y, z] in q.directions() {
            assert!(((x * x + y * y + z * z).sqrt() - 1.0).abs() < 1e-14);
        }
        let second = q.integrate(|d| d[0] * d[0]);
        assert!((second - 1.0 / 3.0).abs() < 1e-13);
        for j in 0..q.len() {
            assert!(q.antipode(j, 1e-14).is_some(), "no antipode for {j}");
        }
    }

    #[test]
    fn theta_major_ordering() {
        let q = build_cl_quadrature::<f64>(4, 3).unwrap();
        let (z, _) = gauss_legendre::<f64>(3).unwrap();
        for j1 in 0..4 {
            for j2 in 0..3 {
                assert!((q.direction(j1 * 3 + j2)[2] - z[j2]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn moments_exact_below_degree_2n() {
        for n in [1usize, 2, 3, 4, 6] {
            let q = build_cl_quadrature::<f64>(2 * n, n).unwrap();
            for deg in 0..(2 * n as i64) {
                for a in 0..=deg {
                    for b in 0..=(deg - a) {
                        let c = deg - a - b;
                        let v = q.integrate(|d| d[0].powi(a as i32) * d[1].powi(b as i32) * d[2].powi(c as i32));
                        assert!((v - sphere_moment(a, b, c)).abs() < 1e-12, "N={n} ({a},{b},{c})");
                    }
                }
            }
        }
    }

    #[test]
    fn single_precision_rule() {
        let q = build_cl_quadrature::<f32>(8, 4).unwrap();
        assert!((q.weights().iter().sum::<f32>() - 1.0).abs() < 1e-6);
        assert!((q.integrate(|d| d[2] * d[2]) - 1.0 / 3.0).abs() < 1e-6);
    }
}
