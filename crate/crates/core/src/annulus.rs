//! Spectral collocation for the annular Dirichlet problem
//!
//! Δu = N in the perturbed annulus, u = (|x|² − T)/(2σ_c) on the inner surface,
//! u = 0 on the outer surface,
//!
//! with u = |x|²/2 + Σ_k (a_k s_k(r) + b_k t_k(r)) Y_k(θ), and the overdetermination
//! map F = (⟨x − ∇u, ν⟩ on the inner surface, u_ν − 1 on the outer surface)
//! projected onto zonal modes.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldSample, ZonalField};
use crate::harmonics::{AngularQuadrature, SurfaceGraph, Vec2, ZonalBasis};
use crate::linearization::{is_log_branch, radial_pair};
use crate::radial::{transmission_constant, PhaseConfig};

/// Condition numbers above this make the least-squares fit untrustworthy.
pub const MAX_CONDITION: f64 = 1e12;

/// Number of θ samples used to certify that the two surfaces do not touch.
const SEPARATION_SAMPLES: usize = 256;

/// Inner surface r = ρ + Σ η̂_k Y_k(θ), outer surface r = 1 + Σ ξ̂_k Y_k(θ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedAnnulus {
    pub dim: usize,
    pub rho: f64,
    pub eta_hat: Vec<f64>,
    pub xi_hat: Vec<f64>,
}

impl PerturbedAnnulus {
    pub fn new(dim: usize, rho: f64, eta_hat: Vec<f64>, xi_hat: Vec<f64>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if eta_hat.len() != xi_hat.len() {
            return Err(Error::LengthMismatch { left: eta_hat.len(), right: xi_hat.len() });
        }
        if eta_hat.is_empty() {
            return Err(Error::InvalidParameter("at least one zonal mode is required".into()));
        }
        let domain = Self { dim, rho, eta_hat, xi_hat };
        domain.check_separation()?;
        Ok(domain)
    }

    /// Concentric annulus B₁ ∖ B̄_ρ carrying modes 0..=K.
    pub fn trivial(dim: usize, rho: f64, max_degree: usize) -> Result<Self> {
        Self::new(dim, rho, vec![0.0; max_degree + 1], vec![0.0; max_degree + 1])
    }

    pub fn max_degree(&self) -> usize {
        self.eta_hat.len() - 1
    }

    fn check_separation(&self) -> Result<()> {
        let basis = ZonalBasis::new(self.dim, self.max_degree())?;
        let (mut min_in, mut max_in, mut min_out) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
        for j in 0..=SEPARATION_SAMPLES {
            let t = std::f64::consts::PI * j as f64 / SEPARATION_SAMPLES as f64;
            let r_in = self.rho + basis.expand(&self.eta_hat, t).0;
            let r_out = 1.0 + basis.expand(&self.xi_hat, t).0;
            min_in = min_in.min(r_in);
            max_in = max_in.max(r_in);
            min_out = min_out.min(r_out);
        }
        if !(min_in > 0.0) {
            return Err(Error::DegenerateAnnulus(format!("inner radius reaches {min_in:.6e}")));
        }
        if !(max_in < min_out) {
            return Err(Error::DegenerateAnnulus(format!(
                "inner surface (max radius {max_in:.6}) meets outer surface (min radius {min_out:.6})"
            )));
        }
        Ok(())
    }

    pub fn inner_surface(&self, quad: &AngularQuadrature, basis: &ZonalBasis) -> Result<SurfaceGraph> {
        SurfaceGraph::from_zonal_expansion(quad, basis, 0.0, self.rho, &self.eta_hat)
    }

    pub fn outer_surface(&self, quad: &AngularQuadrature, basis: &ZonalBasis) -> Result<SurfaceGraph> {
        SurfaceGraph::from_zonal_expansion(quad, basis, 0.0, 1.0, &self.xi_hat)
    }
}

/// Truncation of the harmonic expansion and number of collocation nodes per surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub k_solver: usize,
    pub n_colloc: usize,
}

impl SolverSettings {
    /// K_solver = K + 4 and n_colloc = 4(K + 1), raised to 2 K_solver + 2 if needed.
    pub fn for_degree(max_degree: usize) -> Self {
        let k_solver = max_degree + 4;
        Self { k_solver, n_colloc: (4 * (max_degree + 1)).max(2 * k_solver + 2) }
    }

    fn validate(&self, domain: &PerturbedAnnulus) -> Result<()> {
        if self.k_solver < domain.max_degree() {
            return Err(Error::InvalidParameter(format!(
                "K_solver = {} is below the domain truncation K = {}",
                self.k_solver,
                domain.max_degree()
            )));
        }
        if self.n_colloc < 2 * self.k_solver + 2 {
            return Err(Error::InvalidParameter(format!(
                "n_colloc = {} must be at least 2 K_solver + 2 = {}",
                self.n_colloc,
                2 * self.k_solver + 2
            )));
        }
        Ok(())
    }
}

/// u = |x|²/2 + Σ (a_k s_k + b_k t_k) Y_k.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralSolution {
    pub dim: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Max Dirichlet mismatch at the collocation nodes.
    pub bc_residual: f64,
    /// Ratio of extreme singular values of the scaled collocation matrix.
    pub condition: f64,
    pub transmission: f64,
    #[serde(skip, default = "placeholder_basis")]
    basis: Option<ZonalBasis>,
}

fn placeholder_basis() -> Option<ZonalBasis> {
    None
}

impl SpectralSolution {
    pub fn k_solver(&self) -> usize {
        self.a.len() - 1
    }

    fn basis(&self) -> ZonalBasis {
        match &self.basis {
            Some(b) => b.clone(),
            None => ZonalBasis::new(self.dim, self.k_solver()).expect("dimension was validated at construction"),
        }
    }
}

/// Column scale of the decaying solution: t̃_k = (r/ρ)^{2−N−k} = t_k ρ^{N+k−2}.
fn decay_scale(dim: usize, k: usize, rho: f64) -> f64 {
    if is_log_branch(dim, k) {
        1.0
    } else {
        rho.powi(dim as i32 + k as i32 - 2)
    }
}

pub fn solve_dirichlet(domain: &PerturbedAnnulus, sigma_c: f64, settings: SolverSettings) -> Result<SpectralSolution> {
    let config = PhaseConfig::new(domain.dim, sigma_c, domain.rho)?;
    solve_dirichlet_with_constant(domain, sigma_c, transmission_constant(&config), settings)
}

/// As [`solve_dirichlet`] with the constant T in the inner Dirichlet data supplied by the caller.
pub fn solve_dirichlet_with_constant(
    domain: &PerturbedAnnulus,
    sigma_c: f64,
    transmission: f64,
    settings: SolverSettings,
) -> Result<SpectralSolution> {
    settings.validate(domain)?;
    if !(sigma_c > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma_c must be positive, got {sigma_c}")));
    }
    let dim = domain.dim;
    let ks = settings.k_solver;
    let basis = ZonalBasis::new(dim, ks)?;
    let quad = AngularQuadrature::zonal(dim, settings.n_colloc)?;
    let n = quad.len();
    let cols = 2 * (ks + 1);
    let mut mat = DMatrix::<f64>::zeros(2 * n, cols);
    let mut rhs = DVector::<f64>::zeros(2 * n);
    let scales: Vec<f64> = (0..=ks).map(|k| decay_scale(dim, k, domain.rho)).collect();
    for (j, &t) in quad.nodes().iter().enumerate() {
        let y = basis.eval_all(t).value;
        let r_in = domain.rho + basis.expand(&domain.eta_hat, t).0;
        let r_out = 1.0 + basis.expand(&domain.xi_hat, t).0;
        for (row, r) in [(j, r_in), (n + j, r_out)] {
            for k in 0..=ks {
                let (s, tt) = radial_pair(dim, k, r);
                mat[(row, 2 * k)] = s[0] * y[k];
                mat[(row, 2 * k + 1)] = tt[0] * scales[k] * y[k];
            }
        }
        rhs[j] = (r_in * r_in - transmission) / (2.0 * sigma_c) - 0.5 * r_in * r_in;
        rhs[n + j] = -0.5 * r_out * r_out;
    }
    let svd = mat.clone().svd(true, true);
    let (mut smax, mut smin) = (0.0f64, f64::INFINITY);
    for &s in svd.singular_values.iter() {
        smax = smax.max(s);
        smin = smin.min(s);
    }
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let coeffs = svd.solve(&rhs, 0.0).map_err(|e| Error::Precondition(e.to_string()))?;
    let bc_residual = (&mat * &coeffs - &rhs).amax();
    let a = (0..=ks).map(|k| coeffs[2 * k]).collect();
    let b = (0..=ks).map(|k| coeffs[2 * k + 1] * scales[k]).collect();
    Ok(SpectralSolution { dim, a, b, bc_residual, condition, transmission, basis: Some(basis) })
}

/// Value, gradient and Hessian of the expansion at polar coordinates (r, θ).
pub fn eval_solution(sol: &SpectralSolution, r: f64, theta: f64) -> Result<FieldSample> {
    if !(r > 0.0) {
        return Err(Error::NonpositiveRadius { radius: r, theta });
    }
    Ok(eval_polar(sol, &sol.basis(), r, theta))
}

fn eval_polar(sol: &SpectralSolution, basis: &ZonalBasis, r: f64, theta: f64) -> FieldSample {
    let y = basis.eval_all(theta);
    let (mut f, mut fr, mut frr, mut ft, mut frt, mut ftt, mut ft_sin) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for k in 0..sol.a.len() {
        let (s, t) = radial_pair(sol.dim, k, r);
        let g = [0, 1, 2].map(|i| sol.a[k] * s[i] + sol.b[k] * t[i]);
        f += g[0] * y.value[k];
        fr += g[1] * y.value[k];
        frr += g[2] * y.value[k];
        ft += g[0] * y.d1[k];
        frt += g[1] * y.d1[k];
        ftt += g[0] * y.d2[k];
        ft_sin += g[0] * y.d1_over_sin[k];
    }
    let u_r = r + fr;
    let azimuthal = if sol.dim > 2 { u_r / r + theta.cos() * ft_sin / (r * r) } else { 0.0 };
    FieldSample::from_polar(r, theta, 0.5 * r * r + f, u_r, ft, 1.0 + frr, frt, ftt, azimuthal)
}

impl ZonalField for SpectralSolution {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, point: Vec2) -> FieldSample {
        let basis = self.basis.as_ref().cloned().unwrap_or_else(|| self.basis());
        eval_polar(self, &basis, point.norm(), point[1].atan2(point[0]))
    }
}

/// Zonal projections of F₁ = ⟨x − ∇u, ν⟩ (inner) and F₂ = u_ν − 1 (outer).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverdetResidual {
    pub f1_hat: Vec<f64>,
    pub f2_hat: Vec<f64>,
    pub f1_sup: f64,
    pub f2_sup: f64,
}

impl OverdetResidual {
    /// Largest modal coefficient of either component.
    pub fn modal_norm(&self) -> f64 {
        self.f1_hat.iter().chain(&self.f2_hat).fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn sup_norm(&self) -> f64 {
        self.f1_sup.max(self.f2_sup)
    }

    /// Concatenated modes (F₁ then F₂), the equations of the branch solver.
    pub fn stacked(&self) -> Vec<f64> {
        self.f1_hat.iter().chain(&self.f2_hat).copied().collect()
    }
}

/// Sample F on the physical surfaces at the nodes of the projection rule and
/// project onto Y_0..Y_K, K being the domain truncation.
pub fn overdet_residual(sol: &SpectralSolution, domain: &PerturbedAnnulus, settings: SolverSettings) -> Result<OverdetResidual> {
    let k_max = domain.max_degree();
    let basis = sol.basis();
    let quad = AngularQuadrature::zonal(domain.dim, settings.n_colloc)?;
    let inner = domain.inner_surface(&quad, &basis)?.geometry();
    let outer = domain.outer_surface(&quad, &basis)?.geometry();
    let mut f1_hat = vec![0.0; k_max + 1];
    let mut f2_hat = vec![0.0; k_max + 1];
    let (mut f1_sup, mut f2_sup) = (0.0f64, 0.0f64);
    for (j, (&t, &w)) in quad.nodes().iter().zip(quad.weights()).enumerate() {
        let y = basis.eval_all(t).value;
        let pi = &inner[j];
        let po = &outer[j];
        let si = eval_polar(sol, &basis, pi.position.norm(), t);
        let so = eval_polar(sol, &basis, po.position.norm(), t);
        let f1 = (pi.position - si.gradient).dot(&pi.normal);
        let f2 = so.gradient.dot(&po.normal) - 1.0;
        f1_sup = f1_sup.max(f1.abs());
        f2_sup = f2_sup.max(f2.abs());
        for k in 0..=k_max {
            f1_hat[k] += w * f1 * y[k];
            f2_hat[k] += w * f2 * y[k];
        }
    }
    Ok(OverdetResidual { f1_hat, f2_hat, f1_sup, f2_sup })
}

/// Solve and evaluate F in one step.
pub fn evaluate_map(domain: &PerturbedAnnulus, sigma_c: f64, settings: SolverSettings) -> Result<(SpectralSolution, OverdetResidual)> {
    let sol = solve_dirichlet(domain, sigma_c, settings)?;
    let res = overdet_residual(&sol, domain, settings)?;
    Ok((sol, res))
}
