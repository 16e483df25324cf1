//! L²-normalized zonal spherical harmonics on S^{N-1}.
//!
//! The polar angle θ is measured from the symmetry axis e₁. For N = 2 the
//! zonal (reflection-even) harmonics are cos(kθ); for N ≥ 3 they are the
//! Gegenbauer polynomials C_k^{(N-2)/2}(cos θ).

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Γ(n/2) for a positive integer n.
pub(crate) fn gamma_half_integer(n: usize) -> f64 {
    assert!(n > 0);
    let (mut value, mut x) = if n.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = n as f64 / 2.0;
    while x < target - 1e-9 {
        value *= x;
        x += 1.0;
    }
    value
}

/// Surface area |S^{N-1}| = |∂B₁| of the unit sphere in ℝ^N.
pub fn sphere_area(dim: usize) -> f64 {
    2.0 * PI.powf(dim as f64 / 2.0) / gamma_half_integer(dim)
}

/// Laplace–Beltrami eigenvalue λ_k = k(k + N − 2).
pub fn eigenvalue(degree: usize, dim: usize) -> f64 {
    let k = degree as f64;
    k * (k + dim as f64 - 2.0)
}

/// Values of Gegenbauer polynomials C_0^α(x), …, C_n^α(x).
fn gegenbauer_all(alpha: f64, x: f64, n: usize, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if n == 0 {
        return;
    }
    out[1] = 2.0 * alpha * x;
    for m in 2..=n {
        let mf = m as f64;
        out[m] = (2.0 * x * (mf + alpha - 1.0) * out[m - 1] - (mf + 2.0 * alpha - 2.0) * out[m - 2]) / mf;
    }
}

/// Zonal harmonic values and θ-derivatives at one polar angle.
#[derive(Debug, Clone)]
pub struct ZonalValues {
    pub value: Vec<f64>,
    /// dY_k/dθ
    pub d1: Vec<f64>,
    /// d²Y_k/dθ²
    pub d2: Vec<f64>,
    /// (dY_k/dθ)/sin θ, finite on the axis. Zero for N = 2 where it is unused.
    pub d1_over_sin: Vec<f64>,
}

/// Truncated basis of zonal harmonics Y_0, …, Y_K with unit L² norm on S^{N-1}.
#[derive(Debug, Clone)]
pub struct ZonalBasis {
    dim: usize,
    max_degree: usize,
    /// Multipliers c_k such that Y_k = c_k · P_k with P_k the unnormalized polynomial.
    scale: Vec<f64>,
}

impl ZonalBasis {
    pub fn new(dim: usize, max_degree: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")));
        }
        let area = sphere_area(dim);
        let scale = if dim == 2 {
            (0..=max_degree)
                .map(|k| if k == 0 { 1.0 / (2.0 * PI).sqrt() } else { 1.0 / PI.sqrt() })
                .collect()
        } else {
            // ‖C_k‖² = |S^{N-1}| Π_{m=1}^{k} (m + 2α − 1)(m − 1 + α) / (m (m + α)).
            let alpha = (dim as f64 - 2.0) / 2.0;
            let mut norm_sq = area;
            let mut out = Vec::with_capacity(max_degree + 1);
            out.push(1.0 / norm_sq.sqrt());
            for m in 1..=max_degree {
                let mf = m as f64;
                norm_sq *= (mf + 2.0 * alpha - 1.0) * (mf - 1.0 + alpha) / (mf * (mf + alpha));
                out.push(1.0 / norm_sq.sqrt());
            }
            out
        };
        Ok(Self { dim, max_degree, scale })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Normalization multiplier of degree k.
    pub fn normalization(&self, degree: usize) -> Result<f64> {
        self.check_degree(degree)?;
        Ok(self.scale[degree])
    }

    fn check_degree(&self, degree: usize) -> Result<()> {
        if degree > self.max_degree {
            Err(Error::DegreeOutOfRange { degree, max_degree: self.max_degree })
        } else {
            Ok(())
        }
    }

    /// Normalized zonal harmonic Y_k(θ).
    pub fn eval(&self, degree: usize, theta: f64) -> Result<f64> {
        self.check_degree(degree)?;
        Ok(self.eval_all(theta).value[degree])
    }

    /// All degrees 0..=K with first and second θ-derivatives.
    pub fn eval_all(&self, theta: f64) -> ZonalValues {
        let n = self.max_degree;
        let mut value = vec![0.0; n + 1];
        let mut d1 = vec![0.0; n + 1];
        let mut d2 = vec![0.0; n + 1];
        let mut d1_over_sin = vec![0.0; n + 1];
        if self.dim == 2 {
            for k in 0..=n {
                let kf = k as f64;
                let c = self.scale[k];
                value[k] = c * (kf * theta).cos();
                d1[k] = -c * kf * (kf * theta).sin();
                d2[k] = -c * kf * kf * (kf * theta).cos();
            }
        } else {
            let alpha = (self.dim as f64 - 2.0) / 2.0;
            let x = theta.cos();
            let s = theta.sin();
            let mut c0 = vec![0.0; n + 1];
            let mut c1 = vec![0.0; n + 1];
            let mut c2 = vec![0.0; n + 1];
            gegenbauer_all(alpha, x, n, &mut c0);
            gegenbauer_all(alpha + 1.0, x, n, &mut c1);
            gegenbauer_all(alpha + 2.0, x, n, &mut c2);
            for k in 0..=n {
                let c = self.scale[k];
                // d/dx C_k^α = 2α C_{k-1}^{α+1};  d²/dx² C_k^α = 4α(α+1) C_{k-2}^{α+2}
                let dp = if k >= 1 { 2.0 * alpha * c1[k - 1] } else { 0.0 };
                let ddp = if k >= 2 { 4.0 * alpha * (alpha + 1.0) * c2[k - 2] } else { 0.0 };
                value[k] = c * c0[k];
                d1[k] = -c * s * dp;
                d2[k] = c * (s * s * ddp - x * dp);
                d1_over_sin[k] = -c * dp;
            }
        }
        ZonalValues { value, d1, d2, d1_over_sin }
    }

    /// Evaluate the expansion Σ c_k Y_k(θ) and its first two θ-derivatives.
    pub fn expand(&self, coeffs: &[f64], theta: f64) -> (f64, f64, f64) {
        let vals = self.eval_all(theta);
        coeffs.iter().enumerate().take(self.max_degree + 1).fold((0.0, 0.0, 0.0), |acc, (k, c)| {
            (acc.0 + c * vals.value[k], acc.1 + c * vals.d1[k], acc.2 + c * vals.d2[k])
        })
    }

    /// Zonal Laplace–Beltrami operator Y'' + (N−2) cot θ Y' applied to degree k.
    pub fn laplace_beltrami(&self, degree: usize, theta: f64) -> Result<f64> {
        self.check_degree(degree)?;
        let v = self.eval_all(theta);
        let extra = if self.dim > 2 { (self.dim as f64 - 2.0) * theta.cos() * v.d1_over_sin[degree] } else { 0.0 };
        Ok(v.d2[degree] + extra)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalue(0, 3), 0.0);
        assert_eq!(eigenvalue(2, 3), 6.0);
        assert_eq!(eigenvalue(5, 2), 25.0);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn circle_normalization() {
        let b = ZonalBasis::new(2, 4).unwrap();
        assert!((b.eval(0, 1.234).unwrap() - 0.398_942_280_401_432_7).abs() < 1e-15);
        let th = 0.37;
        assert!((b.eval(3, th).unwrap() - (3.0 * th).cos() / PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sphere_p1_at_pole() {
        let b = ZonalBasis::new(3, 3).unwrap();
        assert!((b.eval(1, 0.0).unwrap() - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        assert!((b.eval(1, 0.0).unwrap() - 0.488_603).abs() < 1e-6);
    }

    #[test]
    fn legendre_case_matches_closed_form() {
        let b = ZonalBasis::new(3, 2).unwrap();
        let th: f64 = 0.8;
        let x = th.cos();
        let p2 = 0.5 * (3.0 * x * x - 1.0);
        assert!((b.eval(2, th).unwrap() - (5.0 / (4.0 * PI)).sqrt() * p2).abs() < 1e-15);
    }

    #[test]
    fn degree_out_of_range() {
        let b = ZonalBasis::new(3, 2).unwrap();
        assert!(matches!(b.eval(3, 0.1), Err(Error::DegreeOutOfRange { .. })));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for dim in [2, 3, 4] {
            let b = ZonalBasis::new(dim, 6).unwrap();
            let th = 1.1;
            let h = 1e-5;
            let v = b.eval_all(th);
            let vp = b.eval_all(th + h);
            let vm = b.eval_all(th - h);
            for k in 0..=6 {
                let fd1 = (vp.value[k] - vm.value[k]) / (2.0 * h);
                let fd2 = (vp.d1[k] - vm.d1[k]) / (2.0 * h);
                assert!((fd1 - v.d1[k]).abs() < 1e-8, "dim {dim} k {k}");
                assert!((fd2 - v.d2[k]).abs() < 1e-7, "dim {dim} k {k}");
            }
        }
    }
}
