//! The shifted-paraboloid counterexample.
//!
//! Outside D₀ = B_R the field u_ε solves Δu = N with Cauchy data on |x| = R
//! taken from the shifted paraboloid f_ε = |x − εe₁|²/(2σ_c) and the flux
//! g_ε = ⟨x − εe₁, ν⟩. The data only carry zonal degrees 0 and 1, so the
//! exterior solution is the two-mode expression
//!
//! u_ε = r²/2 + a₀ + (a₁ r + b₁ r^{1−N}) cos θ.
//!
//! Gluing f_ε − γ inside D₀ to u_ε − γ outside gives a two-phase torsion
//! function which is radial about εe₁ in D₀ while Ω = {u_ε < γ} is not a
//! ball about either candidate center.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldSample, ShiftedField, ZonalField};
use crate::harmonics::{direction, AngularQuadrature, SurfaceGraph, Vec2};
use crate::identities::{verify_identity, IdentityReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CKConfig {
    pub dim: usize,
    pub sigma_c: f64,
    /// Radius of D₀.
    pub radius: f64,
    /// Offset of the radiality center εe₁.
    pub epsilon: f64,
    /// Outer radius bounding the region where admissibility is checked.
    pub r2: f64,
    pub gamma: f64,
}

impl CKConfig {
    /// Validate everything except admissibility; γ is checked later against the gap.
    pub fn new(dim: usize, sigma_c: f64, radius: f64, epsilon: f64, r2: f64, gamma: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")));
        }
        if !(sigma_c > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma_c must be positive, got {sigma_c}")));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
        }
        if !(epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be nonnegative, got {epsilon}")));
        }
        if !(r2 >= radius) {
            return Err(Error::InvalidParameter(format!("R2 = {r2} must be at least R = {radius}")));
        }
        Ok(Self { dim, sigma_c, radius, epsilon, r2, gamma })
    }

    /// Choose ε by dyadic trial when `epsilon` is `None` and γ as the gap midpoint
    /// when `gamma` is `None`.
    pub fn resolve(
        dim: usize,
        sigma_c: f64,
        radius: f64,
        r2: Option<f64>,
        epsilon: Option<f64>,
        gamma: Option<f64>,
    ) -> Result<Self> {
        let r2 = r2.unwrap_or(2.0 * radius);
        let probe = Self::new(dim, sigma_c, radius, 0.0, r2, 0.0)?;
        let epsilon = match epsilon {
            Some(e) => e,
            None => select_epsilon(dim, sigma_c, radius, r2)?,
        };
        let mut cfg = Self { epsilon, ..probe };
        cfg = Self::new(cfg.dim, cfg.sigma_c, cfg.radius, cfg.epsilon, cfg.r2, 0.0)?;
        cfg.gamma = match gamma {
            Some(g) => g,
            None => {
                let gap = check_gap(&exterior_cauchy_solution(&cfg), &cfg);
                0.5 * (gap.max_inner + gap.min_outer)
            }
        };
        Ok(cfg)
    }

    /// λ² = 2σ_c γ, the interior quadratic parameter after the shift by −εe₁.
    pub fn lambda_sq(&self) -> f64 {
        2.0 * self.sigma_c * self.gamma
    }
}

/// Modal exterior solution; evaluators are valid for r > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CKSolution {
    pub dim: usize,
    pub sigma_c: f64,
    pub radius: f64,
    pub epsilon: f64,
    pub a0: f64,
    pub a1: f64,
    pub b1: f64,
}

/// Polar partial derivatives (u, u_r, u_θ, u_rr, u_rθ, u_θθ).
#[derive(Debug, Clone, Copy)]
pub struct PolarDerivatives {
    pub u: f64,
    pub u_r: f64,
    pub u_t: f64,
    pub u_rr: f64,
    pub u_rt: f64,
    pub u_tt: f64,
}

pub fn exterior_cauchy_solution(config: &CKConfig) -> CKSolution {
    let (n, s, r, e) = (config.dim as f64, config.sigma_c, config.radius, config.epsilon);
    let contrast = 1.0 - 1.0 / s;
    CKSolution {
        dim: config.dim,
        sigma_c: s,
        radius: r,
        epsilon: e,
        a0: (r * r + e * e) / (2.0 * s) - r * r / 2.0,
        a1: -e + (n - 1.0) / n * e * contrast,
        b1: e * r.powf(n) * contrast / n,
    }
}

impl CKSolution {
    /// h(r) = a₁ r + b₁ r^{1−N} and its first two derivatives.
    fn mode_one(&self, r: f64) -> (f64, f64, f64) {
        let n = self.dim as f64;
        let p = r.powf(-n);
        (self.a1 * r + self.b1 * r * p, self.a1 + (1.0 - n) * self.b1 * p, (1.0 - n) * (-n) * self.b1 * p / r)
    }

    pub fn polar(&self, r: f64, theta: f64) -> PolarDerivatives {
        let (h, dh, ddh) = self.mode_one(r);
        let (s, c) = theta.sin_cos();
        PolarDerivatives {
            u: 0.5 * r * r + self.a0 + h * c,
            u_r: r + dh * c,
            u_t: -h * s,
            u_rr: 1.0 + ddh * c,
            u_rt: -dh * s,
            u_tt: -h * c,
        }
    }

    pub fn value(&self, r: f64, theta: f64) -> f64 {
        self.polar(r, theta).u
    }

    pub fn radial_derivative(&self, r: f64, theta: f64) -> f64 {
        self.polar(r, theta).u_r
    }

    /// Cauchy data f_ε and g_ε at angle θ on |x| = R.
    pub fn cauchy_data(&self, theta: f64) -> (f64, f64) {
        let x = direction(theta) * self.radius - Vec2::new(self.epsilon, 0.0);
        (x.norm_squared() / (2.0 * self.sigma_c), x.dot(&direction(theta)))
    }

    /// max over θ of |u_ε − f_ε| and |∂_r u_ε − g_ε| on |x| = R.
    pub fn cauchy_residual(&self, samples: usize) -> (f64, f64) {
        let mut out = (0.0f64, 0.0f64);
        for j in 0..=samples {
            let t = std::f64::consts::PI * j as f64 / samples as f64;
            let (f, g) = self.cauchy_data(t);
            let d = self.polar(self.radius, t);
            out.0 = out.0.max((d.u - f).abs());
            out.1 = out.1.max((d.u_r - g).abs());
        }
        out
    }

    /// Inner phase f_ε (before subtracting γ) and its gradient.
    pub fn interior(&self, point: Vec2) -> (f64, Vec2) {
        let y = point - Vec2::new(self.epsilon, 0.0);
        (y.norm_squared() / (2.0 * self.sigma_c), y / self.sigma_c)
    }
}

impl ZonalField for CKSolution {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, point: Vec2) -> FieldSample {
        let n = self.dim as f64;
        let r2 = point.norm_squared();
        let r = r2.sqrt();
        let x1 = point[0];
        let p = r.powf(-n - 2.0);
        let e1 = Vec2::new(1.0, 0.0);
        // φ = x₁ r^{−N}: ∇φ = e₁ r^{−N} − N x₁ r^{−N−2} x
        let grad_phi = e1 * (p * r2) - point * (n * x1 * p);
        let mut hess_phi = Matrix2::identity() * (-n * x1 * p);
        hess_phi -= (e1 * point.transpose() + point * e1.transpose()) * (n * p);
        hess_phi += point * point.transpose() * (n * (n + 2.0) * x1 * p / r2);
        FieldSample {
            value: 0.5 * r2 + self.a0 + self.a1 * x1 + self.b1 * x1 * p * r2,
            gradient: point + e1 * self.a1 + grad_phi * self.b1,
            hessian: Matrix2::identity() + hess_phi * self.b1,
            azimuthal: 1.0 - self.b1 * n * x1 * p,
        }
    }
}

/// Resolution of the (r, θ) grid used by the admissibility checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckGrid {
    pub radial: usize,
    pub angular: usize,
}

impl Default for CheckGrid {
    fn default() -> Self {
        Self { radial: 201, angular: 181 }
    }
}

fn angle_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| std::f64::consts::PI * j as f64 / (n - 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityCheck {
    pub ok: bool,
    pub min_radial_derivative: f64,
}

/// Requires ⟨∇u_ε, x/|x|⟩ > R/2 on B̄_{R2} ∖ D₀.
pub fn check_monotonicity(sol: &CKSolution, config: &CKConfig, grid: CheckGrid) -> MonotonicityCheck {
    let mut min = f64::INFINITY;
    for i in 0..grid.radial {
        let r = config.radius + (config.r2 - config.radius) * i as f64 / (grid.radial - 1).max(1) as f64;
        for t in angle_grid(grid.angular) {
            min = min.min(sol.radial_derivative(r, t));
        }
    }
    MonotonicityCheck { ok: min > 0.5 * config.radius, min_radial_derivative: min }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapCheck {
    pub ok: bool,
    pub max_inner: f64,
    pub min_outer: f64,
}

/// Requires max_{∂D₀} u_ε < min_{∂B_{R2}} u_ε. The θ-profiles are affine in cos θ,
/// so the extrema sit at the poles, both of which are on the grid.
pub fn check_gap(sol: &CKSolution, config: &CKConfig) -> GapCheck {
    let grid = CheckGrid::default();
    let max_inner = angle_grid(grid.angular).map(|t| sol.value(config.radius, t)).fold(f64::NEG_INFINITY, f64::max);
    let min_outer = angle_grid(grid.angular).map(|t| sol.value(config.r2, t)).fold(f64::INFINITY, f64::min);
    GapCheck { ok: max_inner < min_outer, max_inner, min_outer }
}

/// Largest ε in R/2, R/4, … passing both checks.
pub fn select_epsilon(dim: usize, sigma_c: f64, radius: f64, r2: f64) -> Result<f64> {
    for j in 1..=20 {
        let epsilon = radius / 2f64.powi(j);
        let cfg = CKConfig::new(dim, sigma_c, radius, epsilon, r2, 0.0)?;
        let sol = exterior_cauchy_solution(&cfg);
        if check_monotonicity(&sol, &cfg, CheckGrid::default()).ok && check_gap(&sol, &cfg).ok {
            return Ok(epsilon);
        }
    }
    Err(Error::Inadmissible(format!("no admissible epsilon down to 2^-20 R (R = {radius}, R2 = {r2})")))
}

/// The unique r ∈ (R, R2) with u_ε(r θ) = γ.
pub fn level_radius(sol: &CKSolution, config: &CKConfig, gamma: f64, theta: f64) -> Result<f64> {
    let (mut lo, mut hi) = (config.radius, config.r2);
    let (f_lo, f_hi) = (sol.value(lo, theta) - gamma, sol.value(hi, theta) - gamma);
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::LevelOutsideGap { gamma, lower: f_lo + gamma, upper: f_hi + gamma });
    }
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if sol.value(mid, theta) < gamma {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = sol.polar(r, theta);
        let step = (d.u - gamma) / d.u_r;
        let next = r - step;
        if !(next > config.radius && next < config.r2) {
            break;
        }
        r = next;
        if step.abs() < 1e-16 * r {
            break;
        }
    }
    Ok(r)
}

/// (r, r′, r″) of the level curve at θ by implicit differentiation.
fn level_profile(sol: &CKSolution, config: &CKConfig, gamma: f64, theta: f64) -> Result<(f64, f64, f64)> {
    let r = level_radius(sol, config, gamma, theta)?;
    let d = sol.polar(r, theta);
    let dr = -d.u_t / d.u_r;
    let ddr = -(d.u_rr * dr * dr + 2.0 * d.u_rt * dr + d.u_tt) / d.u_r;
    Ok((r, dr, ddr))
}

/// Samples of ∂Ω and the diagnostics separating it from a ball.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleDomain {
    pub config: CKConfig,
    pub solution: CKSolution,
    pub theta: Vec<f64>,
    pub radius: Vec<f64>,
    pub d_radius: Vec<f64>,
    pub dd_radius: Vec<f64>,
    pub r_at_zero: f64,
    pub r_at_pi: f64,
    /// Spread max − min of the distance from the origin to ∂Ω.
    pub asphericity_origin: f64,
    /// Spread of the distance from εe₁ to ∂Ω.
    pub asphericity_shifted: f64,
    /// r(0) − r(π).
    pub axial_defect_origin: f64,
    /// (r(0) − ε) − (r(π) + ε).
    pub axial_defect_shifted: f64,
    /// Area-weighted standard deviation of u_ν over ∂Ω.
    pub outer_flux_std: f64,
    /// Largest standard deviation of |∇u| over spheres about εe₁ inside D₀.
    pub interior_gradient_std: f64,
    /// Jumps of value and σ-weighted flux across ∂D₀.
    pub transmission_residual: (f64, f64),
    pub monotonicity: MonotonicityCheck,
    pub gap: GapCheck,
}

/// Tolerance under which a spread counts as zero.
pub const SPHERICITY_TOL: f64 = 1e-10;

impl CounterexampleDomain {
    pub fn is_ball_about_origin(&self) -> bool {
        self.asphericity_origin < SPHERICITY_TOL
    }

    pub fn is_ball_about_shifted_center(&self) -> bool {
        self.asphericity_shifted < SPHERICITY_TOL
    }
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    hi - lo
}

fn weighted_std(values: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    let mean = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total;
    (values.iter().zip(weights).map(|(v, w)| w * (v - mean).powi(2)).sum::<f64>() / total).sqrt()
}

/// Sample ∂Ω on the nodes of `quad` and compute the diagnostics.
pub fn build_counterexample(config: &CKConfig, quad: &AngularQuadrature) -> Result<CounterexampleDomain> {
    if quad.dim() != config.dim {
        return Err(Error::InvalidParameter(format!("quadrature is for N = {}, config has N = {}", quad.dim(), config.dim)));
    }
    let sol = exterior_cauchy_solution(config);
    let monotonicity = check_monotonicity(&sol, config, CheckGrid::default());
    let gap = check_gap(&sol, config);
    if !monotonicity.ok {
        return Err(Error::Inadmissible(format!(
            "radial derivative drops to {:.6} <= R/2 = {}",
            monotonicity.min_radial_derivative,
            0.5 * config.radius
        )));
    }
    if !(config.gamma > gap.max_inner && config.gamma < gap.min_outer) {
        return Err(Error::LevelOutsideGap { gamma: config.gamma, lower: gap.max_inner, upper: gap.min_outer });
    }
    let mut theta = Vec::with_capacity(quad.len());
    let (mut radius, mut d_radius, mut dd_radius) = (Vec::new(), Vec::new(), Vec::new());
    for &t in quad.nodes() {
        let (r, dr, ddr) = level_profile(&sol, config, config.gamma, t)?;
        theta.push(t);
        radius.push(r);
        d_radius.push(dr);
        dd_radius.push(ddr);
    }
    let r_at_zero = level_radius(&sol, config, config.gamma, 0.0)?;
    let r_at_pi = level_radius(&sol, config, config.gamma, std::f64::consts::PI)?;
    let eps = Vec2::new(config.epsilon, 0.0);
    let points: Vec<Vec2> = theta.iter().zip(&radius).map(|(&t, &r)| direction(t) * r).collect();
    let with_poles = || points.iter().copied().chain([Vec2::new(r_at_zero, 0.0), Vec2::new(-r_at_pi, 0.0)]);
    let asphericity_origin = spread(with_poles().map(|p| p.norm()));
    let asphericity_shifted = spread(with_poles().map(|p| (p - eps).norm()));

    let surface = SurfaceGraph::from_samples(
        config.dim,
        0.0,
        theta.clone(),
        quad.weights().to_vec(),
        radius.clone(),
        d_radius.clone(),
        dd_radius.clone(),
    )?;
    let geometry = surface.geometry();
    let flux: Vec<f64> = geometry.iter().map(|p| sol.sample(p.position).gradient.dot(&p.normal)).collect();
    let area: Vec<f64> = geometry.iter().map(|p| p.area_weight).collect();
    let outer_flux_std = weighted_std(&flux, &area);

    let mut interior_gradient_std = 0.0f64;
    for frac in [0.2, 0.5, 0.8] {
        let s = frac * config.radius;
        if s + config.epsilon >= config.radius {
            continue;
        }
        let norms: Vec<f64> = quad.nodes().iter().map(|&t| sol.interior(eps + direction(t) * s).1.norm()).collect();
        interior_gradient_std = interior_gradient_std.max(weighted_std(&norms, quad.weights()));
    }

    let mut transmission_residual = (0.0f64, 0.0f64);
    for &t in quad.nodes() {
        let p = direction(t) * config.radius;
        let (f, grad_f) = sol.interior(p);
        let outer = sol.sample(p);
        transmission_residual.0 = transmission_residual.0.max((f - outer.value).abs());
        let jump = config.sigma_c * grad_f.dot(&direction(t)) - outer.gradient.dot(&direction(t));
        transmission_residual.1 = transmission_residual.1.max(jump.abs());
    }

    Ok(CounterexampleDomain {
        config: *config,
        solution: sol,
        theta,
        radius,
        d_radius,
        dd_radius,
        r_at_zero,
        r_at_pi,
        asphericity_origin,
        asphericity_shifted,
        axial_defect_origin: r_at_zero - r_at_pi,
        axial_defect_shifted: (r_at_zero - config.epsilon) - (r_at_pi + config.epsilon),
        outer_flux_std,
        interior_gradient_std,
        transmission_residual,
        monotonicity,
        gap,
    })
}

/// The counterexample recentered at εe₁, ready for the integral identity.
#[derive(Debug, Clone)]
pub struct IdentityFrame {
    /// u_ε(· + εe₁) − γ.
    pub field: ShiftedField<CKSolution>,
    /// ∂D = ∂B_R(−εe₁).
    pub inner: SurfaceGraph,
    /// The shifted level surface.
    pub outer: SurfaceGraph,
    pub sigma_c: f64,
    pub lambda_sq: f64,
}

impl IdentityFrame {
    pub fn verify(&self, xi: f64, radial_order: usize) -> Result<IdentityReport> {
        verify_identity(&self.field, &self.inner, &self.outer, self.sigma_c, self.lambda_sq, xi, radial_order)
    }
}

/// Both surfaces stay polar graphs about the original origin, which sits at −εe₁
/// in the new frame.
pub fn translate_to_identity_frame(domain: &CounterexampleDomain, quad: &AngularQuadrature) -> Result<IdentityFrame> {
    let cfg = &domain.config;
    if quad.nodes() != domain.theta.as_slice() {
        return Err(Error::Precondition("quadrature nodes differ from the sampled boundary".into()));
    }
    let center = -cfg.epsilon;
    let inner = SurfaceGraph::sphere(quad, center, cfg.radius)?;
    let outer = SurfaceGraph::from_samples(
        cfg.dim,
        center,
        domain.theta.clone(),
        quad.weights().to_vec(),
        domain.radius.clone(),
        domain.d_radius.clone(),
        domain.dd_radius.clone(),
    )?;
    Ok(IdentityFrame {
        field: ShiftedField { inner: domain.solution, shift: cfg.epsilon, level: cfg.gamma },
        inner,
        outer,
        sigma_c: cfg.sigma_c,
        lambda_sq: cfg.lambda_sq(),
    })
}
