//! Mode-by-mode linearization of the overdetermination map at the trivial branch.
//!
//! For a zonal perturbation η = β Y_k(·/R), ξ = γ Y_k the shape derivative is
//! {(βA_k + γC_k) s_k(r) + (βB_k + γD_k) t_k(r)} Y_k(θ) and the derivative of
//! the map acts on (β, γ) through the 2×2 matrix M(R, k).

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::eigenvalue;

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("inner radius must lie in (0, 1), got {r}")))
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim >= 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")))
    }
}

/// True for the logarithmic pair (N = 2, k = 0).
pub fn is_log_branch(dim: usize, k: usize) -> bool {
    dim == 2 && k == 0
}

/// The two independent radial solutions of f″ + (N−1)f′/r − λ_k f/r² = 0 and their
/// first two derivatives: ([s, s′, s″], [t, t′, t″]).
pub fn radial_pair(dim: usize, k: usize, r: f64) -> ([f64; 3], [f64; 3]) {
    if is_log_branch(dim, k) {
        return ([1.0, 0.0, 0.0], [r.ln(), 1.0 / r, -1.0 / (r * r)]);
    }
    let p = k as f64;
    let q = 2.0 - dim as f64 - p;
    let s = [r.powf(p), p * r.powf(p - 1.0), p * (p - 1.0) * r.powf(p - 2.0)];
    let t = [r.powf(q), q * r.powf(q - 1.0), q * (q - 1.0) * r.powf(q - 2.0)];
    (s, t)
}

/// Coefficients A_k … D_k of the shape-derivative mode solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub dim: usize,
    pub sigma_c: f64,
    pub radius: f64,
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ModeCoefficients {
    pub fn s(&self, r: f64) -> f64 {
        radial_pair(self.dim, self.k, r).0[0]
    }

    pub fn t(&self, r: f64) -> f64 {
        radial_pair(self.dim, self.k, r).1[0]
    }

    /// Residuals of the four boundary equations, in the order
    /// inner/β, inner/γ, outer/β, outer/γ.
    pub fn boundary_residuals(&self) -> [f64; 4] {
        let r = self.radius;
        let inner = ((1.0 - self.sigma_c) / self.sigma_c) * r;
        [
            self.a * self.s(r) + self.b * self.t(r) - inner,
            self.c * self.s(r) + self.d * self.t(r),
            self.a * self.s(1.0) + self.b * self.t(1.0),
            self.c * self.s(1.0) + self.d * self.t(1.0) + 1.0,
        ]
    }
}

pub fn mode_coefficients(dim: usize, sigma_c: f64, radius: f64, k: usize) -> Result<ModeCoefficients> {
    check_dim(dim)?;
    check_radius(radius)?;
    let ratio = (1.0 - sigma_c) / sigma_c;
    let (a, b, c, d) = if is_log_branch(dim, k) {
        let log_r = radius.ln();
        (0.0, ratio * radius / log_r, -1.0, 1.0 / log_r)
    } else {
        let m = (dim + 2 * k) as f64 - 2.0;
        let x = radius.powf(m);
        let lead = radius.powf(dim as f64 - 1.0 + k as f64) / (x - 1.0);
        (ratio * lead, -ratio * lead, 1.0 / (x - 1.0), -x / (x - 1.0))
    };
    Ok(ModeCoefficients { dim, sigma_c, radius, k, a, b, c, d })
}

/// The shape derivative u′[η, ξ] for η = β Y_k(·/R), ξ = γ Y_k.
#[derive(Debug, Clone, Copy)]
pub struct LinearizedField {
    pub coeffs: ModeCoefficients,
    pub beta: f64,
    pub gamma: f64,
}

pub fn linearized_field(coeffs: ModeCoefficients, beta: f64, gamma: f64) -> LinearizedField {
    LinearizedField { coeffs, beta, gamma }
}

impl LinearizedField {
    fn weights(&self) -> (f64, f64) {
        let m = &self.coeffs;
        (self.beta * m.a + self.gamma * m.c, self.beta * m.b + self.gamma * m.d)
    }

    /// Radial profile f(r) and its first two derivatives; u′ = f(r) Y_k(θ).
    pub fn profile(&self, r: f64) -> [f64; 3] {
        let (ws, wt) = self.weights();
        let (s, t) = radial_pair(self.coeffs.dim, self.coeffs.k, r);
        [ws * s[0] + wt * t[0], ws * s[1] + wt * t[1], ws * s[2] + wt * t[2]]
    }

    pub fn value(&self, r: f64, harmonic: f64) -> f64 {
        self.profile(r)[0] * harmonic
    }

    /// Residual f″ + (N−1) f′/r − λ_k f / r² of the separated Laplace equation.
    pub fn ode_residual(&self, r: f64) -> f64 {
        let [f, df, ddf] = self.profile(r);
        let n = self.coeffs.dim as f64;
        ddf + (n - 1.0) * df / r - eigenvalue(self.coeffs.k, self.coeffs.dim) * f / (r * r)
    }
}

/// The 2×2 matrix M(R, k) = [[𝒜, ℬ], [𝒞, 𝒟]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrechetMatrix {
    pub dim: usize,
    pub sigma_c: f64,
    pub radius: f64,
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl FrechetMatrix {
    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.a, self.b, self.c, self.d)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// M (β, γ)ᵀ.
    pub fn apply(&self, beta: f64, gamma: f64) -> (f64, f64) {
        (self.a * beta + self.b * gamma, self.c * beta + self.d * gamma)
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> (f64, f64) {
        let sv = self.matrix().singular_values();
        (sv[0].max(sv[1]), sv[0].min(sv[1]))
    }
}

pub fn frechet_matrix(dim: usize, sigma_c: f64, radius: f64, k: usize) -> Result<FrechetMatrix> {
    check_dim(dim)?;
    check_radius(radius)?;
    let s = (sigma_c - 1.0) / sigma_c;
    let (a, b, c, d) = if is_log_branch(dim, k) {
        // −∂_r u′ at r = R and ∂_r u′ + ξ at r = 1, with t₀′(r) = 1/r
        let lr = radius.ln();
        (s / lr, -1.0 / (radius * lr), -s * radius / lr, (1.0 + lr) / lr)
    } else {
        let n = dim as f64;
        let kf = k as f64;
        let m = n - 2.0 + 2.0 * kf;
        let x = radius.powf(m);
        let den = x - 1.0;
        (
            s * (kf * x + (kf + n - 2.0)) / den,
            -m * radius.powf(kf - 1.0) / den,
            -s * m * radius.powf(n - 1.0 + kf) / den,
            ((kf + n - 1.0) * x + (kf - 1.0)) / den,
        )
    };
    Ok(FrechetMatrix { dim, sigma_c, radius, k, a, b, c, d })
}

/// det M(R, k) evaluated from the matrix entries.
pub fn det_m(dim: usize, sigma_c: f64, radius: f64, k: usize) -> Result<f64> {
    Ok(frechet_matrix(dim, sigma_c, radius, k)?.det())
}

/// g(R, k), the polynomial in x = R^{N−2+2k} whose roots are the zeros of det M(·, k).
pub fn g_polynomial(dim: usize, radius: f64, k: usize) -> f64 {
    let (n, kf) = (dim as f64, k as f64);
    let x = radius.powf(n - 2.0 + 2.0 * kf);
    (kf * n + kf * kf - kf) * x * x + (-2.0 * kf * n - 2.0 * kf * kf + n + 4.0 * kf - 2.0) * x
        + (kf * n + kf * kf - n - 3.0 * kf + 2.0)
}

/// Factored closed forms of det M(R, k): the g-form for k ≥ 2 and the explicit
/// expressions for k ∈ {0, 1}.
pub fn det_m_closed_form(dim: usize, sigma_c: f64, radius: f64, k: usize) -> Result<f64> {
    check_dim(dim)?;
    check_radius(radius)?;
    let s = (sigma_c - 1.0) / sigma_c;
    let n = dim as f64;
    Ok(match k {
        0 if dim == 2 => s / radius.ln(),
        0 => s * (n - 2.0) * radius.powf(2.0 - n) / (1.0 - radius.powf(2.0 - n)),
        1 => {
            let x = radius.powf(n);
            s * n * x / ((x - 1.0) * (x - 1.0)) * (x - 1.0)
        }
        _ => {
            let x = radius.powf(n - 2.0 + 2.0 * k as f64);
            s * g_polynomial(dim, radius, k) / ((x - 1.0) * (x - 1.0))
        }
    })
}

/// Closed form of det ∂_R M(R, k).
pub fn det_dr_closed_form(dim: usize, sigma_c: f64, radius: f64, k: usize) -> f64 {
    let (n, kf) = (dim as f64, k as f64);
    let x = radius.powf(n - 2.0 + 2.0 * kf);
    ((1.0 - sigma_c) / sigma_c) * radius.powf(2.0 * kf + n - 4.0) / ((x - 1.0) * (x - 1.0))
        * (n + 2.0 * kf - 2.0).powi(2)
        * (n + kf - 1.0)
        * (kf - 1.0)
}

/// Entrywise ∂_R M(R, k), differentiated analytically.
pub fn dr_frechet_matrix(dim: usize, sigma_c: f64, radius: f64, k: usize) -> Result<FrechetMatrix> {
    check_dim(dim)?;
    check_radius(radius)?;
    let s = (sigma_c - 1.0) / sigma_c;
    let r = radius;
    let (a, b, c, d) = if is_log_branch(dim, k) {
        let lr = r.ln();
        let l2 = lr * lr;
        (-s / (r * l2), (lr + 1.0) / (r * r * l2), -s * (lr - 1.0) / l2, -1.0 / (r * l2))
    } else {
        let (n, kf) = (dim as f64, k as f64);
        let m = n - 2.0 + 2.0 * kf;
        let x = r.powf(m);
        let dx = m * r.powf(m - 1.0);
        let den = x - 1.0;
        // d/dR [p / (x − 1)] = (p′(x − 1) − p x′) / (x − 1)²
        let quot = |p: f64, dp: f64| (dp * den - p * dx) / (den * den);
        (
            quot(s * (kf * x + kf + n - 2.0), s * kf * dx),
            quot(-m * r.powf(kf - 1.0), -m * (kf - 1.0) * r.powf(kf - 2.0)),
            quot(-s * m * r.powf(n - 1.0 + kf), -s * m * (n - 1.0 + kf) * r.powf(n - 2.0 + kf)),
            quot((kf + n - 1.0) * x + kf - 1.0, (kf + n - 1.0) * dx),
        )
    };
    Ok(FrechetMatrix { dim, sigma_c, radius, k, a, b, c, d })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootMethod {
    ClosedForm,
    RootFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalRadius {
    pub k: usize,
    pub dim: usize,
    pub r_star: f64,
    pub method: RootMethod,
}

/// Closed form R*(k): the root in (0, 1) of the quadratic g(·, k) in x = R^{N−2+2k},
/// x* = 1 − (N + 2k − 2)/(kN + k² − k).
pub fn critical_radius_closed_form(dim: usize, k: usize) -> Result<f64> {
    check_dim(dim)?;
    if k < 2 {
        return Err(Error::NoCriticalRadius(k));
    }
    let (n, kf) = (dim as f64, k as f64);
    let x = 1.0 - (n + 2.0 * kf - 2.0) / (kf * n + kf * kf - kf);
    Ok(x.powf(1.0 / (n - 2.0 + 2.0 * kf)))
}

/// Bracket a sign change of `f` on [lo, hi] by scanning, then bisect to `tol`.
pub fn scan_and_bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, scan: usize, tol: f64) -> Result<f64> {
    let step = (hi - lo) / scan as f64;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=scan {
        let b = if i == scan { hi } else { lo + step * i as f64 };
        let fb = f(b);
        if fa == 0.0 {
            return Ok(a);
        }
        if fa.signum() != fb.signum() {
            return Ok(bisect(&f, a, b, fa, tol));
        }
        a = b;
        fa = fb;
    }
    Err(Error::NoBracket(format!("no sign change on [{lo}, {hi}]")))
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

pub fn critical_radius(dim: usize, k: usize, method: RootMethod, sigma_c: f64) -> Result<CriticalRadius> {
    check_dim(dim)?;
    if k < 2 {
        return Err(Error::NoCriticalRadius(k));
    }
    let r_star = match method {
        RootMethod::ClosedForm => critical_radius_closed_form(dim, k)?,
        RootMethod::RootFound => {
            if sigma_c == 1.0 {
                return Err(Error::SinglePhase);
            }
            let f = |r: f64| frechet_matrix(dim, sigma_c, r, k).map(|m| m.det()).unwrap_or(f64::NAN);
            scan_and_bisect(f, 1e-6, 1.0 - 1e-6, 1000, 1e-13)?
        }
    };
    Ok(CriticalRadius { k, dim, r_star, method })
}

/// Unit null vector (β, γ) of M(R*(k), k), first nonzero component positive.
pub fn kernel_vector(dim: usize, sigma_c: f64, k: usize) -> Result<(f64, f64)> {
    if sigma_c == 1.0 {
        return Err(Error::SinglePhase);
    }
    let r_star = critical_radius_closed_form(dim, k)?;
    let m = frechet_matrix(dim, sigma_c, r_star, k)?;
    Ok(null_vector(&m))
}

/// Null direction of the dominant row of a (numerically) rank-one matrix.
pub fn null_vector(m: &FrechetMatrix) -> (f64, f64) {
    let (p, q) = if m.a.hypot(m.b) >= m.c.hypot(m.d) { (m.a, m.b) } else { (m.c, m.d) };
    let mut v = Vector2::new(-q, p).normalize();
    let first = if v[0] != 0.0 { v[0] } else { v[1] };
    if first < 0.0 {
        v = -v;
    }
    (v[0], v[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: solve the four boundary equations as a linear system.
    fn coefficients_by_linear_solve(dim: usize, sigma: f64, r: f64, k: usize) -> [f64; 4] {
        let (s_r, t_r) = radial_pair(dim, k, r);
        let (s_1, t_1) = radial_pair(dim, k, 1.0);
        let m = Matrix2::new(s_r[0], t_r[0], s_1[0], t_1[0]);
        let inv = m.try_inverse().unwrap();
        let ab = inv * Vector2::new((1.0 - sigma) / sigma * r, 0.0);
        let cd = inv * Vector2::new(0.0, -1.0);
        [ab[0], ab[1], cd[0], cd[1]]
    }

    #[test]
    fn mode_coefficients_example() {
        let m = mode_coefficients(2, 2.0, 0.5, 2).unwrap();
        let oracle = coefficients_by_linear_solve(2, 2.0, 0.5, 2);
        for (got, want) in [m.a, m.b, m.c, m.d].iter().zip(oracle) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!((m.a - 0.066_666_7).abs() < 1e-7);
        assert!((m.b + 0.066_666_7).abs() < 1e-7);
        assert!((m.c + 1.066_666_7).abs() < 1e-7);
        assert!((m.d - 0.066_666_7).abs() < 1e-7);
    }

    #[test]
    fn log_branch_coefficients() {
        let m = mode_coefficients(2, 2.0, 0.5, 0).unwrap();
        assert_eq!(m.a, 0.0);
        assert!((m.b - 0.360_674).abs() < 1e-6);
        assert_eq!(m.c, -1.0);
        assert!((m.d + std::f64::consts::LOG2_E).abs() < 1e-12);
        assert!(m.boundary_residuals().iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn coefficients_reject_bad_radius() {
        assert!(mode_coefficients(2, 2.0, 1.0, 2).is_err());
        assert!(frechet_matrix(3, 2.0, 0.0, 2).is_err());
    }

    #[test]
    fn boundary_invariants_on_grid() {
        for dim in [2, 3, 4] {
            for sigma in [0.3, 2.0, 7.0] {
                for r in [0.2, 0.5, 0.8] {
                    for k in 0..=10 {
                        let m = mode_coefficients(dim, sigma, r, k).unwrap();
                        for res in m.boundary_residuals() {
                            assert!(res.abs() < 1e-12, "dim {dim} sigma {sigma} r {r} k {k}: {res}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn linearized_field_boundary_values() {
        let c = mode_coefficients(2, 2.0, 0.5, 2).unwrap();
        assert_eq!(linearized_field(c, 0.0, 0.0).profile(0.7), [0.0, 0.0, 0.0]);
        let f = linearized_field(c, 1.0, 0.0);
        assert!((f.profile(0.5)[0] + 0.25).abs() < 1e-14);
        let g = linearized_field(c, 0.0, 1.0);
        assert!((g.profile(1.0)[0] + 1.0).abs() < 1e-14);
        for r in [0.55, 0.7, 0.95] {
            assert!(linearized_field(c, 0.3, -1.2).ode_residual(r).abs() < 1e-10);
        }
    }

    /// Oracle: F₁′ = −∂_r u′ at r = R and F₂′ = ∂_r u′ + γ at r = 1, from the mode solution.
    #[test]
    fn frechet_entries_match_mode_solution() {
        for dim in [2, 3, 4] {
            for sigma in [0.3, 2.0, 7.0] {
                for r in [0.2, 0.5, 0.8] {
                    for k in 0..=10 {
                        let c = mode_coefficients(dim, sigma, r, k).unwrap();
                        let beta = linearized_field(c, 1.0, 0.0);
                        let gamma = linearized_field(c, 0.0, 1.0);
                        let oracle = [-beta.profile(r)[1], -gamma.profile(r)[1], beta.profile(1.0)[1], gamma.profile(1.0)[1] + 1.0];
                        let m = frechet_matrix(dim, sigma, r, k).unwrap();
                        for (got, want) in [m.a, m.b, m.c, m.d].iter().zip(oracle) {
                            assert!((got - want).abs() <= 1e-11 * want.abs().max(1.0), "dim {dim} sigma {sigma} r {r} k {k}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn frechet_examples() {
        let m = frechet_matrix(2, 2.0, 0.5, 2).unwrap();
        assert!((m.a + 1.133_333).abs() < 1e-6);
        assert!((m.b - 2.133_333).abs() < 1e-6);
        assert!((m.c - 0.266_667).abs() < 1e-6);
        assert!((m.d + 1.266_667).abs() < 1e-6);
        assert!((m.det() - 0.866_667).abs() < 1e-6);
        let g_form = 0.5 * (6.0 * 0.5f64.powi(8) - 8.0 * 0.5f64.powi(4) + 2.0) / (0.5f64.powi(4) - 1.0).powi(2);
        assert!((m.det() - g_form).abs() < 1e-14);
        let single = frechet_matrix(3, 1.0, 0.4, 3).unwrap();
        assert_eq!((single.a, single.c), (0.0, 0.0));
        let k1 = det_m(2, 2.0, 0.5, 1).unwrap();
        assert!((k1 + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn det_low_modes_never_vanish() {
        for dim in [2, 3, 4] {
            for i in 1..100 {
                let r = i as f64 / 100.0;
                for k in [0, 1] {
                    let d = det_m(dim, 2.0, r, k).unwrap();
                    assert!(d != 0.0 && d.is_finite(), "dim {dim} r {r} k {k}");
                    assert_eq!(d.signum(), -1.0, "dim {dim} r {r} k {k}");
                    let closed = det_m_closed_form(dim, 2.0, r, k).unwrap();
                    assert!((d - closed).abs() <= 1e-12 * d.abs().max(1e-300), "dim {dim} r {r} k {k}");
                }
                if dim >= 3 {
                    let d0 = det_m(dim, 2.0, r, 0).unwrap();
                    let expected_sign = 0.5 * (dim as f64 - 2.0) * r.powf(2.0 - dim as f64) / (1.0 - r.powf(2.0 - dim as f64));
                    assert_eq!(d0.signum(), expected_sign.signum());
                }
            }
        }
    }

    #[test]
    fn critical_radius_examples() {
        let r2 = critical_radius(2, 2, RootMethod::ClosedForm, 2.0).unwrap().r_star;
        assert!((r2 - (1.0f64 / 3.0).powf(0.25)).abs() < 1e-15);
        assert!((r2 - 0.759_836).abs() < 1e-6);
        let r3 = critical_radius(3, 2, RootMethod::RootFound, 2.0).unwrap().r_star;
        assert!((r3 - (3.0f64 / 8.0).powf(0.2)).abs() < 1e-10);
        assert!((r3 - 0.821_876).abs() < 1e-6);
        let r23 = critical_radius_closed_form(2, 3).unwrap();
        assert!(r23 > r2);
        assert_eq!(critical_radius(2, 1, RootMethod::ClosedForm, 2.0), Err(Error::NoCriticalRadius(1)));
    }

    #[test]
    fn dr_matrix_example() {
        let d = dr_frechet_matrix(2, 2.0, 0.5, 2).unwrap();
        assert!((d.det() - det_dr_closed_form(2, 2.0, 0.5, 2)).abs() < 1e-12);
        assert!((d.det() + 6.826_667).abs() < 1e-6);
        assert_eq!(det_dr_closed_form(3, 2.0, 0.5, 1), 0.0);
    }

    #[test]
    fn dr_entries_match_finite_differences() {
        let h = 1e-6;
        for dim in [2, 3, 4] {
            for k in 0..=6 {
                for r in [0.2, 0.5, 0.8] {
                    let d = dr_frechet_matrix(dim, 2.0, r, k).unwrap();
                    let p = frechet_matrix(dim, 2.0, r + h, k).unwrap();
                    let m = frechet_matrix(dim, 2.0, r - h, k).unwrap();
                    for (exact, fd) in [
                        (d.a, (p.a - m.a) / (2.0 * h)),
                        (d.b, (p.b - m.b) / (2.0 * h)),
                        (d.c, (p.c - m.c) / (2.0 * h)),
                        (d.d, (p.d - m.d) / (2.0 * h)),
                    ] {
                        assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1.0), "dim {dim} k {k} r {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_is_null_direction() {
        let (beta, gamma) = kernel_vector(2, 2.0, 2).unwrap();
        assert!((beta.hypot(gamma) - 1.0).abs() < 1e-15);
        let r = (1.0f64 / 3.0).powf(0.25);
        let m = frechet_matrix(2, 2.0, r, 2).unwrap();
        let (x, y) = m.apply(beta, gamma);
        assert!(x.hypot(y) < 1e-10);
        let proportional = Vector2::new(-m.b, m.a).normalize();
        assert!((proportional[0] * gamma - proportional[1] * beta).abs() < 1e-12);
        let (big, small) = m.singular_values();
        assert!(small < 1e-10 && big > 1e-2);
        assert_eq!(kernel_vector(2, 1.0, 2), Err(Error::SinglePhase));
    }
}
