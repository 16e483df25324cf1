//! The Weinberger-type integral identity for two-phase solutions that are
//! quadratic inside the inclusion:
//!
//! ∫_{Ω∖D̄} (−u) {|∇²u|² − (Δu)²/N} dx = I + II + III,
//!
//! with the three boundary terms evaluated by surface quadrature, closed forms
//! when D = B₁(z), and the volume side by product radial × angular quadrature.
//!
//! All runs are axisymmetric about e₁, so z and ξ are axial scalars.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ZonalField;
use crate::harmonics::basis::gamma_half_integer;
use crate::harmonics::{gauss_legendre_interval, AngularQuadrature, SurfaceGraph, SurfacePoint, Vec2};

/// (|B₁|, |∂B₁|) in ℝ^N.
pub fn unit_ball_volume(dim: usize) -> (f64, f64) {
    let n = dim as f64;
    // Γ(N/2 + 1) = (N/2) Γ(N/2)
    let volume = std::f64::consts::PI.powf(n / 2.0) / (0.5 * n * gamma_half_integer(dim));
    (volume, n * volume)
}

/// D = B₁(z e₁) with u = (|x|² − λ²)/(2σ_c) inside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffsetBallConfig {
    pub dim: usize,
    pub sigma_c: f64,
    pub z: f64,
    pub lambda: f64,
}

impl OffsetBallConfig {
    pub fn new(dim: usize, sigma_c: f64, z: f64, lambda: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")));
        }
        if !(sigma_c > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma_c must be positive, got {sigma_c}")));
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { dim, sigma_c, z, lambda })
    }

    pub fn surface(&self, quad: &AngularQuadrature) -> Result<SurfaceGraph> {
        SurfaceGraph::sphere(quad, self.z, 1.0)
    }

    /// Values of the interior quadratic at the nodes of `surface`.
    pub fn interior_values(&self, points: &[SurfacePoint]) -> Vec<f64> {
        points.iter().map(|p| (p.position.norm_squared() - self.lambda * self.lambda) / (2.0 * self.sigma_c)).collect()
    }
}

/// I = ½ ∫_{∂Ω} u_ν² [u_ν − ⟨x − ξ, ν⟩] dS.
pub fn term_i(outer: &[SurfacePoint], u_nu: &[f64], xi: f64) -> Result<f64> {
    if outer.len() != u_nu.len() {
        return Err(Error::LengthMismatch { left: outer.len(), right: u_nu.len() });
    }
    let xi = Vec2::new(xi, 0.0);
    Ok(outer
        .iter()
        .zip(u_nu)
        .map(|(p, &g)| 0.5 * g * g * (g - (p.position - xi).dot(&p.normal)) * p.area_weight)
        .sum())
}

/// II by quadrature over ∂D, using the meridian curvature for ⟨D_τν x_τ, x_τ⟩.
pub fn term_ii_quadrature(inner: &[SurfacePoint], dim: usize, sigma_c: f64, lambda_sq: f64) -> f64 {
    let n = dim as f64;
    let pre = (1.0 / sigma_c) * (1.0 / sigma_c - 1.0);
    if pre == 0.0 {
        return 0.0;
    }
    let sum: f64 = inner
        .iter()
        .map(|p| {
            let xn = p.position.dot(&p.normal);
            let x2 = p.position.norm_squared();
            let bracket = p.shape_operator_contraction() / sigma_c + (n - 1.0) * (1.0 - p.mean_curvature * xn) * xn;
            (xn * (xn * xn - x2) + 0.5 * (lambda_sq - x2) * bracket) * p.area_weight
        })
        .sum();
    pre * sum
}

pub fn term_ii_closed(cfg: &OffsetBallConfig) -> f64 {
    let s = 1.0 / cfg.sigma_c;
    let (ball, _) = unit_ball_volume(cfg.dim);
    let z2 = cfg.z * cfg.z;
    s * (s - 1.0).powi(2) * (cfg.dim as f64 - 1.0) * 0.5 * (cfg.lambda * cfg.lambda - z2 - 1.0) * ball * z2
}

/// III by quadrature over ∂D, given the values of u at the nodes.
pub fn term_iii_quadrature(inner: &[SurfacePoint], u: &[f64], dim: usize, sigma_c: f64, xi: f64) -> Result<f64> {
    if inner.len() != u.len() {
        return Err(Error::LengthMismatch { left: inner.len(), right: u.len() });
    }
    let n = dim as f64;
    let s2 = 1.0 / (sigma_c * sigma_c);
    let xi = Vec2::new(xi, 0.0);
    Ok(inner
        .iter()
        .zip(u)
        .map(|(p, &uv)| {
            let xn = p.position.dot(&p.normal);
            let x2 = p.position.norm_squared();
            let xin = xi.dot(&p.normal);
            let f = n * uv * xin + 0.5 * xin * ((1.0 - s2) * xn * xn + x2 * s2)
                - (1.0 - 1.0 / sigma_c) * xn * xn * xin
                - xn * xi.dot(&p.position) / sigma_c;
            f * p.area_weight
        })
        .sum())
}

pub fn term_iii_closed(cfg: &OffsetBallConfig, xi: f64) -> f64 {
    (1.0 / cfg.sigma_c - 1.0) * cfg.z * xi * unit_ball_volume(cfg.dim).0
}

/// Axial component of ∇_ξ III = (1/σ_c − 1) z |B₁| (the transverse part vanishes).
pub fn grad_xi_iii_closed(cfg: &OffsetBallConfig) -> f64 {
    (1.0 / cfg.sigma_c - 1.0) * cfg.z * unit_ball_volume(cfg.dim).0
}

/// Axial component of ∇_ξ III for a general axisymmetric D, from
/// (N/σ + 1/σ²) ∫_D x + ∫_{∂D} {(1/σ − ½ − 1/(2σ²)) ⟨x,ν⟩² ν − ⟨x,ν⟩ x/σ},
/// where ∫_D x = ½ ∫_{∂D} |x|² ν.
pub fn grad_xi_iii_quadrature(inner: &[SurfacePoint], dim: usize, sigma_c: f64) -> f64 {
    let n = dim as f64;
    let coef = 1.0 / sigma_c - 0.5 - 0.5 / (sigma_c * sigma_c);
    let mut first_moment = 0.0;
    let mut boundary = 0.0;
    for p in inner {
        let xn = p.position.dot(&p.normal);
        first_moment += 0.5 * p.position.norm_squared() * p.normal[0] * p.area_weight;
        boundary += (coef * xn * xn * p.normal[0] - xn * p.position[0] / sigma_c) * p.area_weight;
    }
    (n / sigma_c + 1.0 / (sigma_c * sigma_c)) * first_moment + boundary
}

/// Outcome of the volume quadrature of the deficit integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeficitReport {
    pub value: f64,
    /// Same quadrature at half the radial order, for the resolution check.
    pub coarse_value: f64,
    /// Smallest pointwise |∇²u|² − (Δu)²/N over the nodes.
    pub min_pointwise: f64,
    /// Number of nodes where −u < 0 (should be zero by the maximum principle).
    pub sign_violations: usize,
}

/// Relative agreement demanded between the radial orders n and ⌈n/2⌉.
pub const RESOLUTION_TOL: f64 = 1e-8;

fn shell_quadrature<F: ZonalField>(
    field: &F,
    inner: &SurfaceGraph,
    outer: &SurfaceGraph,
    radial_order: usize,
    stats: &mut (f64, usize),
) -> f64 {
    let dim = field.dim();
    let (center, weights) = (inner.center(), inner.weights());
    let mut total = 0.0;
    for (j, &theta) in inner.theta().iter().enumerate() {
        let (r0, r1) = (inner.radius()[j], outer.radius()[j]);
        let (nodes, w) = gauss_legendre_interval(radial_order, r0, r1);
        let e = crate::harmonics::direction(theta);
        let mut line = 0.0;
        for (&r, &wr) in nodes.iter().zip(&w) {
            let s = field.sample(Vec2::new(center, 0.0) + e * r);
            let cs = s.traceless_hessian_sq(dim);
            stats.0 = stats.0.min(cs);
            if s.value > 0.0 {
                stats.1 += 1;
            }
            line += wr * r.powi(dim as i32 - 1) * (-s.value) * cs;
        }
        total += weights[j] * line;
    }
    total
}

/// ∫_{Ω∖D̄} (−u) {|∇²u|² − (Δu)²/N} dx over the shell between two polar graphs
/// sharing center and angular nodes.
pub fn deficit_integral<F: ZonalField>(
    field: &F,
    inner: &SurfaceGraph,
    outer: &SurfaceGraph,
    radial_order: usize,
) -> Result<DeficitReport> {
    if inner.len() != outer.len() {
        return Err(Error::LengthMismatch { left: inner.len(), right: outer.len() });
    }
    if inner.center() != outer.center() || inner.theta() != outer.theta() {
        return Err(Error::Precondition("inner and outer surfaces must share center and nodes".into()));
    }
    if let Some(j) = (0..inner.len()).find(|&j| inner.radius()[j] >= outer.radius()[j]) {
        return Err(Error::DegenerateAnnulus(format!("inner surface meets outer surface at theta = {}", inner.theta()[j])));
    }
    if radial_order < 2 {
        return Err(Error::InvalidParameter(format!("radial order must be >= 2, got {radial_order}")));
    }
    let mut stats = (f64::INFINITY, 0);
    let value = shell_quadrature(field, inner, outer, radial_order, &mut stats);
    let mut scratch = (f64::INFINITY, 0);
    let coarse_value = shell_quadrature(field, inner, outer, radial_order.div_ceil(2), &mut scratch);
    if (value - coarse_value).abs() > RESOLUTION_TOL * value.abs().max(1e-8) {
        return Err(Error::UnderResolved { coarse: coarse_value, fine: value });
    }
    Ok(DeficitReport { value, coarse_value, min_pointwise: stats.0, sign_violations: stats.1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub deficit: f64,
    #[serde(rename = "I")]
    pub term_i: f64,
    #[serde(rename = "II")]
    pub term_ii: f64,
    #[serde(rename = "III")]
    pub term_iii: f64,
    pub xi: f64,
    pub residual: f64,
    pub relative_residual: f64,
    pub min_pointwise: f64,
    pub sign_violations: usize,
}

/// Largest tolerated mismatch between u on ∂D and the interior quadratic.
pub const INTERIOR_QUADRATIC_TOL: f64 = 1e-10;

/// Evaluate both sides of the identity for a field that is quadratic in D,
/// with D and Ω given as polar graphs about a common axial point.
pub fn verify_identity<F: ZonalField>(
    field: &F,
    inner: &SurfaceGraph,
    outer: &SurfaceGraph,
    sigma_c: f64,
    lambda_sq: f64,
    xi: f64,
    radial_order: usize,
) -> Result<IdentityReport> {
    let dim = field.dim();
    let inner_pts = inner.geometry();
    let outer_pts = outer.geometry();
    let u_inner: Vec<f64> = inner_pts.iter().map(|p| field.sample(p.position).value).collect();
    for (p, &u) in inner_pts.iter().zip(&u_inner) {
        let quadratic = (p.position.norm_squared() - lambda_sq) / (2.0 * sigma_c);
        if (u - quadratic).abs() > INTERIOR_QUADRATIC_TOL {
            return Err(Error::Precondition(format!(
                "u differs from the interior quadratic by {:.3e} at theta = {}",
                (u - quadratic).abs(),
                p.theta
            )));
        }
    }
    let u_nu: Vec<f64> = outer_pts.iter().map(|p| field.sample(p.position).gradient.dot(&p.normal)).collect();
    let deficit = deficit_integral(field, inner, outer, radial_order)?;
    let term_i = term_i(&outer_pts, &u_nu, xi)?;
    let term_ii = term_ii_quadrature(&inner_pts, dim, sigma_c, lambda_sq);
    let term_iii = term_iii_quadrature(&inner_pts, &u_inner, dim, sigma_c, xi)?;
    let rhs = term_i + term_ii + term_iii;
    let residual = (deficit.value - rhs).abs();
    let scale = deficit.value.abs().max(term_i.abs() + term_ii.abs() + term_iii.abs());
    Ok(IdentityReport {
        deficit: deficit.value,
        term_i,
        term_ii,
        term_iii,
        xi,
        residual,
        relative_residual: if scale > 0.0 { residual / scale } else { 0.0 },
        min_pointwise: deficit.min_pointwise,
        sign_violations: deficit.sign_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{radial_solution, PhaseConfig};
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes() {
        let (v2, s2) = unit_ball_volume(2);
        assert!((v2 - PI).abs() < 1e-15 && (s2 - 2.0 * PI).abs() < 1e-14);
        let (v3, s3) = unit_ball_volume(3);
        assert!((v3 - 4.0 * PI / 3.0).abs() < 1e-14 && (s3 - 4.0 * PI).abs() < 1e-14);
        let (v4, s4) = unit_ball_volume(4);
        assert!((v4 - PI * PI / 2.0).abs() < 1e-14 && (s4 - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn term_i_examples() {
        let q = AngularQuadrature::zonal(3, 16).unwrap();
        let unit = SurfaceGraph::sphere(&q, 0.0, 1.0).unwrap().geometry();
        assert!(term_i(&unit, &vec![1.0; unit.len()], 0.0).unwrap().abs() < 1e-14);
        let big = SurfaceGraph::sphere(&q, 0.0, 1.7).unwrap().geometry();
        assert!(term_i(&big, &vec![1.7; big.len()], 0.0).unwrap().abs() < 1e-13);
        // constant flux c on a perturbed surface: (c³/2)|∂Ω| − (c²/2) N |Ω|
        let b = crate::harmonics::ZonalBasis::new(3, 3).unwrap();
        let s = SurfaceGraph::from_zonal_expansion(&q, &b, 0.0, 1.0, &[0.0, 0.0, 0.05, 0.02]).unwrap();
        let pts = s.geometry();
        let c = 0.8;
        let area: f64 = pts.iter().map(|p| p.area_weight).sum();
        // divergence theorem: N|Ω| = ∫ ⟨x, ν⟩ dS
        let vol: f64 = pts.iter().map(|p| p.position.dot(&p.normal) * p.area_weight).sum::<f64>() / 3.0;
        let expected = 0.5 * c * c * c * area - 0.5 * c * c * 3.0 * vol;
        for xi in [0.0, 0.4] {
            assert!((term_i(&pts, &vec![c; pts.len()], xi).unwrap() - expected).abs() < 1e-12);
        }
        assert!(term_i(&pts, &[1.0], 0.0).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let cfg = OffsetBallConfig::new(2, 2.0, 0.1, 1.2).unwrap();
        assert!((term_ii_closed(&cfg) - 0.000_268_75 * PI).abs() < 1e-15);
        assert!((term_iii_closed(&cfg, 1.0) + 0.05 * PI).abs() < 1e-15);
        assert!((grad_xi_iii_closed(&cfg) + 0.157_080).abs() < 1e-6);
        assert_eq!(term_iii_closed(&cfg, 0.0), 0.0);
        let centered = OffsetBallConfig::new(3, 2.0, 0.0, 1.5).unwrap();
        assert_eq!(term_ii_closed(&centered), 0.0);
        assert_eq!(grad_xi_iii_closed(&centered), 0.0);
        let single = OffsetBallConfig::new(3, 1.0, 0.3, 1.5).unwrap();
        assert_eq!(term_ii_closed(&single), 0.0);
        assert_eq!(term_iii_closed(&single, 1.0), 0.0);
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        for dim in [2, 3] {
            for (sigma, z, lambda) in [(2.0, 0.1, 1.2), (0.3, -0.4, 1.9), (4.5, 0.25, 1.0)] {
                let cfg = OffsetBallConfig::new(dim, sigma, z, lambda).unwrap();
                let q = AngularQuadrature::zonal(dim, 32).unwrap();
                let pts = cfg.surface(&q).unwrap().geometry();
                let ii = term_ii_quadrature(&pts, dim, sigma, lambda * lambda);
                assert!((ii - term_ii_closed(&cfg)).abs() <= 1e-10 * ii.abs().max(1e-3), "{dim} {sigma} {z}");
                let u = cfg.interior_values(&pts);
                for xi in [0.0, 1.0, -0.3] {
                    let iii = term_iii_quadrature(&pts, &u, dim, sigma, xi).unwrap();
                    assert!((iii - term_iii_closed(&cfg, xi)).abs() <= 1e-10 * iii.abs().max(1e-3));
                }
                let g = grad_xi_iii_quadrature(&pts, dim, sigma);
                assert!((g - grad_xi_iii_closed(&cfg)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn centered_ball_has_zero_ii() {
        let q = AngularQuadrature::zonal(3, 12).unwrap();
        let pts = SurfaceGraph::sphere(&q, 0.0, 1.0).unwrap().geometry();
        assert!(term_ii_quadrature(&pts, 3, 2.0, 1.3).abs() < 1e-14);
    }

    #[test]
    fn radial_configuration_identity_is_trivial() {
        for dim in [2, 3] {
            let cfg = PhaseConfig::new(dim, 2.0, 0.5).unwrap();
            let sol = radial_solution(&cfg);
            let q = AngularQuadrature::zonal(dim, 16).unwrap();
            let inner = SurfaceGraph::sphere(&q, 0.0, cfg.rho).unwrap();
            let outer = SurfaceGraph::sphere(&q, 0.0, 1.0).unwrap();
            // the outer formula (|x|² − 1)/2 agrees with (|x|² − T)/(2σ_c) on ∂D
            let t = crate::radial::transmission_constant(&cfg);
            let rep = verify_identity(&sol, &inner, &outer, 2.0, t, 0.0, 8).unwrap();
            assert!(rep.deficit.abs() < 1e-14 && rep.term_i.abs() < 1e-13);
            assert!(rep.term_ii.abs() < 1e-13 && rep.term_iii.abs() < 1e-14);
            assert_eq!(rep.sign_violations, 0);
        }
    }

    #[test]
    fn deficit_vanishes_for_quadratics() {
        let q = AngularQuadrature::zonal(2, 12).unwrap();
        let inner = SurfaceGraph::sphere(&q, 0.2, 0.5).unwrap();
        let outer = SurfaceGraph::sphere(&q, 0.2, 1.0).unwrap();
        let sol = radial_solution(&PhaseConfig::new(2, 3.0, 0.5).unwrap());
        let rep = deficit_integral(&sol, &inner, &outer, 6).unwrap();
        assert!(rep.value.abs() < 1e-15);
        assert!(rep.min_pointwise.abs() < 1e-15);
        assert!(deficit_integral(&sol, &outer, &inner, 6).is_err());
    }
}
