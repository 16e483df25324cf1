//! Axisymmetric scalar fields with exact first and second derivatives.

use nalgebra::Matrix2;

use crate::harmonics::Vec2;

/// Value, gradient and Hessian of an axisymmetric field at one meridian-plane point.
///
/// The full N×N Hessian is block diagonal: the 2×2 meridian block plus the
/// azimuthal entry u_ρ/ρ repeated N − 2 times.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub value: f64,
    pub gradient: Vec2,
    pub hessian: Matrix2<f64>,
    pub azimuthal: f64,
}

impl FieldSample {
    /// Convert polar partial derivatives to a meridian-plane sample.
    #[allow(clippy::too_many_arguments)]
    pub fn from_polar(r: f64, theta: f64, u: f64, u_r: f64, u_t: f64, u_rr: f64, u_rt: f64, u_tt: f64, azimuthal: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let e_r = Vec2::new(c, s);
        let e_t = Vec2::new(-s, c);
        let gradient = e_r * u_r + e_t * (u_t / r);
        let h_rr = u_rr;
        let h_rt = u_rt / r - u_t / (r * r);
        let h_tt = u_tt / (r * r) + u_r / r;
        let q = Matrix2::new(c, -s, s, c);
        let polar = Matrix2::new(h_rr, h_rt, h_rt, h_tt);
        FieldSample { value: u, gradient, hessian: q * polar * q.transpose(), azimuthal }
    }

    pub fn laplacian(&self, dim: usize) -> f64 {
        self.hessian.trace() + (dim as f64 - 2.0) * self.azimuthal
    }

    /// Squared Frobenius norm of the full Hessian.
    pub fn hessian_norm_sq(&self, dim: usize) -> f64 {
        self.hessian.norm_squared() + (dim as f64 - 2.0) * self.azimuthal * self.azimuthal
    }

    /// |∇²u|² − (Δu)²/N, nonnegative by Cauchy–Schwarz.
    pub fn traceless_hessian_sq(&self, dim: usize) -> f64 {
        let lap = self.laplacian(dim);
        self.hessian_norm_sq(dim) - lap * lap / dim as f64
    }
}

/// An axisymmetric field about the e₁ axis.
pub trait ZonalField {
    fn dim(&self) -> usize;

    /// Sample at a meridian-plane point (axial, transverse).
    fn sample(&self, point: Vec2) -> FieldSample;
}

/// A field translated and offset: x ↦ inner(x + shift e₁) − level.
#[derive(Debug, Clone)]
pub struct ShiftedField<F> {
    pub inner: F,
    pub shift: f64,
    pub level: f64,
}

impl<F: ZonalField> ZonalField for ShiftedField<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn sample(&self, point: Vec2) -> FieldSample {
        let mut s = self.inner.sample(point + Vec2::new(self.shift, 0.0));
        s.value -= self.level;
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_conversion_of_quadratic() {
        // u = x₁² + 3 x₁ x₂ in the plane: u = r²(cos²θ + 3 cosθ sinθ)
        let (r, t): (f64, f64) = (1.3, 0.4);
        let g = |t: f64| t.cos().powi(2) + 3.0 * t.cos() * t.sin();
        let dg = |t: f64| -2.0 * t.cos() * t.sin() + 3.0 * (2.0 * t).cos();
        let ddg = |t: f64| -2.0 * (2.0 * t).cos() - 6.0 * (2.0 * t).sin();
        let s = FieldSample::from_polar(r, t, r * r * g(t), 2.0 * r * g(t), r * r * dg(t), 2.0 * g(t), 2.0 * r * dg(t), r * r * ddg(t), 0.0);
        let (x1, x2) = (r * t.cos(), r * t.sin());
        assert!((s.gradient[0] - (2.0 * x1 + 3.0 * x2)).abs() < 1e-13);
        assert!((s.gradient[1] - 3.0 * x1).abs() < 1e-13);
        assert!((s.hessian[(0, 0)] - 2.0).abs() < 1e-13);
        assert!((s.hessian[(0, 1)] - 3.0).abs() < 1e-13);
        assert!(s.hessian[(1, 1)].abs() < 1e-13);
    }
}
