//! Tangential geometry of axisymmetric surfaces written as polar graphs.
//!
//! A surface is {c e₁ + r(θ) ω(θ)}, where ω(θ) is the unit direction at polar
//! angle θ from e₁ and c is an axial offset of the polar origin. All vectors
//! live in the meridian half-plane spanned by e₁ and the transverse radial
//! direction, stored as (axial, transverse) pairs.

use nalgebra::Vector2;

use super::basis::ZonalBasis;
use super::quadrature::AngularQuadrature;
use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;

/// Unit direction at polar angle θ in the meridian plane.
pub fn direction(theta: f64) -> Vec2 {
    Vec2::new(theta.cos(), theta.sin())
}

/// Samples of a polar graph r(θ) (with analytic derivatives) at quadrature nodes.
#[derive(Debug, Clone)]
pub struct SurfaceGraph {
    dim: usize,
    center: f64,
    theta: Vec<f64>,
    weights: Vec<f64>,
    radius: Vec<f64>,
    d_radius: Vec<f64>,
    dd_radius: Vec<f64>,
}

/// Geometric data at one surface node.
#[derive(Debug, Clone, Copy)]
pub struct SurfacePoint {
    pub theta: f64,
    /// Position in the meridian plane, including the axial offset.
    pub position: Vec2,
    /// Outward unit normal.
    pub normal: Vec2,
    /// Mean curvature H = div_τ ν / (N − 1); the unit sphere has H ≡ 1.
    pub mean_curvature: f64,
    /// Principal curvature along the meridian curve.
    pub meridian_curvature: f64,
    /// Quadrature weight for ∫ f dS over the surface.
    pub area_weight: f64,
}

impl SurfacePoint {
    /// Tangential part x_τ = x − ⟨x, ν⟩ ν of the position.
    pub fn tangential_position(&self) -> Vec2 {
        self.position - self.normal * self.position.dot(&self.normal)
    }

    /// The contraction ⟨D_τ ν x_τ, x_τ⟩. For axisymmetric surfaces x_τ runs along the meridian.
    pub fn shape_operator_contraction(&self) -> f64 {
        self.meridian_curvature * self.tangential_position().norm_squared()
    }
}

impl SurfaceGraph {
    /// Build from a closure returning (r, r′, r″) at each node of `quad`.
    pub fn from_fn<F>(quad: &AngularQuadrature, center: f64, profile: F) -> Result<Self>
    where
        F: Fn(f64) -> (f64, f64, f64),
    {
        let theta = quad.nodes().to_vec();
        let mut radius = Vec::with_capacity(theta.len());
        let mut d_radius = Vec::with_capacity(theta.len());
        let mut dd_radius = Vec::with_capacity(theta.len());
        for &t in &theta {
            let (r, dr, ddr) = profile(t);
            radius.push(r);
            d_radius.push(dr);
            dd_radius.push(ddr);
        }
        Self::from_samples(quad.dim(), center, theta, quad.weights().to_vec(), radius, d_radius, dd_radius)
    }

    pub fn from_samples(
        dim: usize,
        center: f64,
        theta: Vec<f64>,
        weights: Vec<f64>,
        radius: Vec<f64>,
        d_radius: Vec<f64>,
        dd_radius: Vec<f64>,
    ) -> Result<Self> {
        let n = theta.len();
        for len in [weights.len(), radius.len(), d_radius.len(), dd_radius.len()] {
            if len != n {
                return Err(Error::LengthMismatch { left: n, right: len });
            }
        }
        if let Some((i, &r)) = radius.iter().enumerate().find(|(_, r)| !(**r > 0.0)) {
            return Err(Error::NonpositiveRadius { radius: r, theta: theta[i] });
        }
        Ok(Self { dim, center, theta, weights, radius, d_radius, dd_radius })
    }

    /// Sphere of radius `r` about the axial point c e₁.
    pub fn sphere(quad: &AngularQuadrature, center: f64, r: f64) -> Result<Self> {
        Self::from_fn(quad, center, |_| (r, 0.0, 0.0))
    }

    /// r(θ) = base + Σ c_k Y_k(θ), differentiated through the basis.
    pub fn from_zonal_expansion(
        quad: &AngularQuadrature,
        basis: &ZonalBasis,
        center: f64,
        base: f64,
        coeffs: &[f64],
    ) -> Result<Self> {
        Self::from_fn(quad, center, |t| {
            let (v, d1, d2) = basis.expand(coeffs, t);
            (base + v, d1, d2)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Angular quadrature weights (the area weights of the unit sphere).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn radius(&self) -> &[f64] {
        &self.radius
    }

    pub fn d_radius(&self) -> &[f64] {
        &self.d_radius
    }

    /// Normal, curvature, and area element at every node.
    pub fn geometry(&self) -> Vec<SurfacePoint> {
        (0..self.len()).map(|j| self.point(j)).collect()
    }

    fn point(&self, j: usize) -> SurfacePoint {
        let t = self.theta[j];
        let (r, dr, ddr) = (self.radius[j], self.d_radius[j], self.dd_radius[j]);
        let e_r = direction(t);
        let e_t = Vec2::new(-t.sin(), t.cos());
        let speed = (r * r + dr * dr).sqrt();
        let normal = (e_r * r - e_t * dr) / speed;
        let meridian_curvature = (r * r + 2.0 * dr * dr - r * ddr) / speed.powi(3);
        let mean_curvature = if self.dim == 2 {
            meridian_curvature
        } else {
            // parallel curvature ν_ρ / ρ with ρ = r sin θ; r′ cot θ → r″ on the axis
            let s = t.sin();
            let cot_term = if s.abs() < 1e-10 { ddr } else { dr * t.cos() / s };
            let parallel = (1.0 - cot_term / r) / speed;
            (meridian_curvature + (self.dim as f64 - 2.0) * parallel) / (self.dim as f64 - 1.0)
        };
        let area_weight = self.weights[j] * r.powi(self.dim as i32 - 2) * speed;
        SurfacePoint {
            theta: t,
            position: Vec2::new(self.center, 0.0) + e_r * r,
            normal,
            mean_curvature,
            meridian_curvature,
            area_weight,
        }
    }
}

/// Split gradient samples into tangential parts and normal derivatives: ∇f = ∇_τ f + f_ν ν.
pub fn tangential_split<const D: usize>(
    gradients: &[[f64; D]],
    normals: &[[f64; D]],
) -> Result<(Vec<[f64; D]>, Vec<f64>)> {
    if gradients.len() != normals.len() {
        return Err(Error::LengthMismatch { left: gradients.len(), right: normals.len() });
    }
    let mut tangential = Vec::with_capacity(gradients.len());
    let mut normal = Vec::with_capacity(gradients.len());
    for (g, n) in gradients.iter().zip(normals) {
        let f_nu: f64 = g.iter().zip(n).map(|(a, b)| a * b).sum();
        let mut tau = [0.0; D];
        for i in 0..D {
            tau[i] = g[i] - f_nu * n[i];
        }
        tangential.push(tau);
        normal.push(f_nu);
    }
    Ok((tangential, normal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_has_curvature_inverse_radius() {
        for dim in [2, 3] {
            let q = AngularQuadrature::zonal(dim, 12).unwrap();
            for radius in [1.0, 0.37, 2.5] {
                let s = SurfaceGraph::sphere(&q, 0.0, radius).unwrap();
                for p in s.geometry() {
                    assert!((p.mean_curvature - 1.0 / radius).abs() < 1e-12);
                    assert!((p.normal - direction(p.theta)).norm() < 1e-15);
                }
                let area: f64 = s.geometry().iter().map(|p| p.area_weight).sum();
                let exact = if dim == 2 { 2.0 * PI * radius } else { 4.0 * PI * radius * radius };
                assert!((area - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn perturbed_circle_curvature() {
        // r = 1 + 0.1 cos 2θ at θ = 0: (1.21 + 0 + 0.44) / 1.331
        let q = AngularQuadrature::new(2, 8).unwrap();
        let s = SurfaceGraph::from_fn(&q, 0.0, |t| (1.0 + 0.1 * (2.0 * t).cos(), -0.2 * (2.0 * t).sin(), -0.4 * (2.0 * t).cos()))
            .unwrap();
        let p = s.geometry()[0];
        assert!((p.mean_curvature - 1.65 / 1.331).abs() < 1e-14);
        assert!((p.mean_curvature - 1.239_669).abs() < 1e-6);
    }

    #[test]
    fn offset_sphere_shape_operator() {
        // unit sphere about z e₁: D_τ ν x_τ = x_τ
        let q = AngularQuadrature::zonal(3, 10).unwrap();
        let s = SurfaceGraph::sphere(&q, 0.3, 1.0).unwrap();
        for p in s.geometry() {
            assert!((p.shape_operator_contraction() - p.tangential_position().norm_squared()).abs() < 1e-14);
        }
    }

    #[test]
    fn nonpositive_radius_rejected() {
        let q = AngularQuadrature::new(2, 4).unwrap();
        let err = SurfaceGraph::from_fn(&q, 0.0, |t| (t.cos(), 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NonpositiveRadius { .. }));
    }

    #[test]
    fn split_examples() {
        let normals = [[0.6, 0.8]];
        let (tau, f_nu) = tangential_split(&[[0.0, 0.0]], &normals).unwrap();
        assert_eq!((tau[0], f_nu[0]), ([0.0, 0.0], 0.0));
        let (tau, f_nu) = tangential_split(&normals, &normals).unwrap();
        assert!(tau[0].iter().all(|v| v.abs() < 1e-15) && (f_nu[0] - 1.0).abs() < 1e-15);
        // f = x₁ on the unit circle
        let th: f64 = 0.7;
        let n = [th.cos(), th.sin()];
        let (tau, f_nu) = tangential_split(&[[1.0, 0.0]], &[n]).unwrap();
        assert!((f_nu[0] - th.cos()).abs() < 1e-15);
        assert!(((tau[0][0].powi(2) + tau[0][1].powi(2)).sqrt() - th.sin().abs()).abs() < 1e-15);
        assert!(tangential_split(&[[1.0, 0.0]], &[]).is_err());
    }
}
