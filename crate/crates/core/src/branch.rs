//! Continuation of the symmetry-breaking branch bifurcating from the
//! concentric configuration at ρ = R*(k*).
//!
//! The amplitude t is pinned as the k*-th coefficient of the inner boundary,
//! η̂_{k*} = t. The remaining unknowns (the other η̂_k, all ξ̂_k and ρ) solve the
//! 2K + 2 projected equations F̂₁ = F̂₂ = 0 by Newton's method with a
//! central-difference Jacobian.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::annulus::{evaluate_map, PerturbedAnnulus, SolverSettings};
use crate::error::{Error, Result};
use crate::field::ZonalField;
use crate::harmonics::{direction, AngularQuadrature, ZonalBasis};
use crate::linearization::{critical_radius_closed_form, kernel_vector};
use crate::radial::{transmission_constant, PhaseConfig};

/// Jacobians with condition number above this are treated as singular.
pub const MAX_JACOBIAN_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSettings {
    /// Truncation K of η̂, ξ̂ and of the projected equations.
    pub max_degree: usize,
    pub solver: SolverSettings,
    /// Newton stops once the largest modal residual is at most `tol`.
    pub tol: f64,
    pub max_iter: usize,
    pub fd_step: f64,
}

impl BranchSettings {
    /// K = k* + 6 with the solver defaults for that K.
    pub fn for_mode(k_star: usize) -> Self {
        let max_degree = k_star + 6;
        Self { max_degree, solver: SolverSettings::for_degree(max_degree), tol: 1e-10, max_iter: 20, fd_step: 1e-6 }
    }
}

/// One solved configuration on the branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub t: f64,
    pub eta_hat: Vec<f64>,
    pub xi_hat: Vec<f64>,
    pub rho: f64,
    /// Largest modal coefficient of F.
    pub residual_norm: f64,
    /// Largest |F| at the projection nodes.
    pub residual_sup: f64,
    pub newton_iters: usize,
}

impl BranchPoint {
    pub fn domain(&self, dim: usize) -> Result<PerturbedAnnulus> {
        PerturbedAnnulus::new(dim, self.rho, self.eta_hat.clone(), self.xi_hat.clone())
    }

    /// ξ̂_k / η̂_k.
    pub fn mode_ratio(&self, k: usize) -> f64 {
        self.xi_hat[k] / self.eta_hat[k]
    }
}

/// The pinned system F(η, ξ, ρ) = 0 with η̂_{k*} = t.
#[derive(Debug, Clone, Copy)]
pub struct BranchProblem {
    pub dim: usize,
    pub sigma_c: f64,
    pub k_star: usize,
    pub settings: BranchSettings,
}

impl BranchProblem {
    pub fn new(dim: usize, sigma_c: f64, k_star: usize, settings: BranchSettings) -> Result<Self> {
        if k_star < 2 {
            return Err(Error::NoCriticalRadius(k_star));
        }
        Self::pinned(dim, sigma_c, k_star, settings)
    }

    /// Like [`BranchProblem::new`] but allows pinning any mode, including k = 0, 1 where
    /// no bifurcation takes place.
    pub fn pinned(dim: usize, sigma_c: f64, k_star: usize, settings: BranchSettings) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        PhaseConfig::new(dim, sigma_c, 0.5)?.require_two_phase()?;
        if settings.max_degree < k_star + 4 {
            return Err(Error::InvalidParameter(format!(
                "truncation K = {} must be at least k* + 4 = {}",
                settings.max_degree,
                k_star + 4
            )));
        }
        Ok(Self { dim, sigma_c, k_star, settings })
    }

    fn len(&self) -> usize {
        self.settings.max_degree + 1
    }

    /// Configuration (η̂, ξ̂, ρ) from the unknown vector and the pinned amplitude.
    fn unpack(&self, t: f64, x: &DVector<f64>) -> (Vec<f64>, Vec<f64>, f64) {
        let n = self.len();
        let mut eta = Vec::with_capacity(n);
        let mut it = x.iter().copied();
        for k in 0..n {
            eta.push(if k == self.k_star { t } else { it.next().unwrap() });
        }
        let xi: Vec<f64> = it.by_ref().take(n).collect();
        (eta, xi, it.next().unwrap())
    }

    fn pack(&self, eta: &[f64], xi: &[f64], rho: f64) -> DVector<f64> {
        let values = eta
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != self.k_star)
            .map(|(_, v)| *v)
            .chain(xi.iter().copied())
            .chain([rho]);
        DVector::from_iterator(2 * self.len(), values)
    }

    /// Stacked modal residual (F̂₁ then F̂₂) and the nodal sup norm.
    pub fn residual(&self, eta: &[f64], xi: &[f64], rho: f64) -> Result<(DVector<f64>, f64)> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::DegenerateAnnulus(format!("reference radius {rho} left (0, 1)")));
        }
        let domain = PerturbedAnnulus::new(self.dim, rho, eta.to_vec(), xi.to_vec())?;
        let (_, res) = evaluate_map(&domain, self.sigma_c, self.settings.solver)?;
        Ok((DVector::from_vec(res.stacked()), res.sup_norm()))
    }

    fn residual_at(&self, t: f64, x: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
        let (eta, xi, rho) = self.unpack(t, x);
        self.residual(&eta, &xi, rho)
    }

    fn jacobian(&self, t: f64, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let n = x.len();
        let h = self.settings.fd_step;
        let mut jac = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut plus = x.clone();
            plus[i] += h;
            let mut minus = x.clone();
            minus[i] -= h;
            let column = (self.residual_at(t, &plus)?.0 - self.residual_at(t, &minus)?.0) / (2.0 * h);
            jac.set_column(i, &column);
        }
        Ok(jac)
    }

    /// A point at amplitude t with all unknowns taken from the guess.
    pub fn guess(&self, t: f64, eta: &[f64], xi: &[f64], rho: f64) -> BranchPoint {
        let mut eta = eta.to_vec();
        eta[self.k_star] = t;
        BranchPoint {
            t,
            eta_hat: eta,
            xi_hat: xi.to_vec(),
            rho,
            residual_norm: f64::INFINITY,
            residual_sup: f64::INFINITY,
            newton_iters: 0,
        }
    }
}

/// Newton's method on the pinned system, starting from `initial`.
pub fn newton_solve(problem: &BranchProblem, initial: &BranchPoint) -> Result<BranchPoint> {
    let t = initial.t;
    let mut x = problem.pack(&initial.eta_hat, &initial.xi_hat, initial.rho);
    let (mut f, mut sup) = problem.residual_at(t, &x)?;
    let mut norm = f.amax();
    for iter in 0..=problem.settings.max_iter {
        if norm <= problem.settings.tol {
            let (eta_hat, xi_hat, rho) = problem.unpack(t, &x);
            return Ok(BranchPoint { t, eta_hat, xi_hat, rho, residual_norm: norm, residual_sup: sup, newton_iters: iter });
        }
        if iter == problem.settings.max_iter {
            break;
        }
        let jac = problem.jacobian(t, &x)?;
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if condition > MAX_JACOBIAN_CONDITION {
            return Err(Error::SingularJacobian { condition });
        }
        let step = svd.solve(&(-&f), 0.0).map_err(|e| Error::Precondition(e.to_string()))?;
        // halve the step while the annulus degenerates or the residual grows
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..6 {
            let trial = &x + &step * scale;
            match problem.residual_at(t, &trial) {
                Ok((ft, st)) if ft.amax() < norm || scale < 0.05 => {
                    accepted = Some((trial, ft, st));
                    break;
                }
                Ok(_) | Err(Error::DegenerateAnnulus(_) | Error::IllConditioned { .. }) => scale *= 0.5,
                Err(e) => return Err(e),
            }
        }
        let Some((trial, ft, st)) = accepted else {
            return Err(Error::NewtonDiverged { iterations: iter + 1, residual: norm });
        };
        x = trial;
        f = ft;
        sup = st;
        norm = f.amax();
    }
    Err(Error::NewtonDiverged { iterations: problem.settings.max_iter, residual: norm })
}

/// Observed tangent ξ̂_{k*}/η̂_{k*} at a small amplitude against the kernel ratio γ/β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentCheck {
    pub t: f64,
    pub beta: f64,
    pub gamma: f64,
    pub kernel_ratio: f64,
    pub observed_ratio: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchDiagram {
    pub dim: usize,
    pub sigma_c: f64,
    pub k_star: usize,
    pub r_star: f64,
    /// Points ordered by t, starting with the bifurcation point t = 0.
    pub points: Vec<BranchPoint>,
    pub tangent: Option<TangentCheck>,
    /// Why continuation stopped early, if it did.
    pub failure: Option<String>,
}

impl BranchDiagram {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn last(&self) -> &BranchPoint {
        self.points.last().expect("diagram always holds the bifurcation point")
    }
}

/// Amplitude at which the tangent direction is probed.
pub const TANGENT_PROBE: f64 = 1e-3;

/// Trace t = t_max·j/steps, j = 0..=steps. Newton failures end the trace early; the
/// points solved so far are kept and the error is recorded in `failure`.
pub fn trace_branch(
    dim: usize,
    sigma_c: f64,
    k_star: usize,
    t_max: f64,
    steps: usize,
    settings: BranchSettings,
) -> Result<BranchDiagram> {
    let problem = BranchProblem::new(dim, sigma_c, k_star, settings)?;
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be positive".into()));
    }
    let r_star = critical_radius_closed_form(dim, k_star)?;
    let (beta, gamma) = kernel_vector(dim, sigma_c, k_star)?;
    let ratio = gamma / beta;
    let n = settings.max_degree + 1;
    let zeros = vec![0.0; n];

    let origin = newton_solve(&problem, &problem.guess(0.0, &zeros, &zeros, r_star))?;
    let kernel_guess = |t: f64| {
        let mut xi = zeros.clone();
        xi[k_star] = t * ratio;
        problem.guess(t, &zeros, &xi, r_star)
    };

    let tangent = match newton_solve(&problem, &kernel_guess(TANGENT_PROBE)) {
        Ok(p) => {
            let observed = p.mode_ratio(k_star);
            Some(TangentCheck {
                t: TANGENT_PROBE,
                beta,
                gamma,
                kernel_ratio: ratio,
                observed_ratio: observed,
                relative_error: ((observed - ratio) / ratio).abs(),
            })
        }
        Err(_) => None,
    };

    let mut points = vec![origin];
    let mut failure = None;
    for j in 1..=steps {
        let t = t_max * j as f64 / steps as f64;
        let predictor = if points.len() < 2 {
            kernel_guess(t)
        } else {
            // secant extrapolation through the last two solved points
            let (p, q) = (&points[points.len() - 1], &points[points.len() - 2]);
            let w = (t - p.t) / (p.t - q.t);
            let lerp = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + w * (x - y)).collect::<Vec<_>>();
            problem.guess(t, &lerp(&p.eta_hat, &q.eta_hat), &lerp(&p.xi_hat, &q.xi_hat), p.rho + w * (p.rho - q.rho))
        };
        match newton_solve(&problem, &predictor) {
            Ok(p) => points.push(p),
            Err(e) => {
                failure = Some(format!("t = {t}: {e}"));
                break;
            }
        }
    }
    Ok(BranchDiagram { dim, sigma_c, k_star, r_star, points, tangent, failure })
}

/// What Newton does when a mode without a critical radius is pinned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum CollapseOutcome {
    /// Converged with no deformation beyond the pinned mode.
    Trivial { rho: f64, max_other_mode: f64 },
    /// Newton found no configuration carrying the pinned amplitude.
    NoSolution { reason: String },
    /// A genuinely deformed solution; not expected for k ≤ 1.
    Sustained { point: BranchPoint },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseDiagnostic {
    pub k: usize,
    pub t: f64,
    pub rho_start: f64,
    #[serde(flatten)]
    pub outcome: CollapseOutcome,
}

impl CollapseDiagnostic {
    pub fn collapsed(&self) -> bool {
        !matches!(self.outcome, CollapseOutcome::Sustained { .. })
    }
}

/// Pin η̂_k = t for a mode k ∈ {0, 1} and report whether Newton sustains the amplitude.
pub fn branch_collapse(dim: usize, sigma_c: f64, k: usize, t: f64, rho_start: f64) -> Result<CollapseDiagnostic> {
    let settings = BranchSettings::for_mode(k.max(2));
    let problem = BranchProblem::pinned(dim, sigma_c, k, settings)?;
    let zeros = vec![0.0; settings.max_degree + 1];
    let outcome = match newton_solve(&problem, &problem.guess(t, &zeros, &zeros, rho_start)) {
        Ok(point) => {
            let max_other_mode = point
                .eta_hat
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, v)| v.abs())
                .chain(point.xi_hat.iter().map(|v| v.abs()))
                .fold(0.0, f64::max);
            if max_other_mode <= 1e-9 {
                CollapseOutcome::Trivial { rho: point.rho, max_other_mode }
            } else {
                CollapseOutcome::Sustained { point }
            }
        }
        Err(e @ (Error::NewtonDiverged { .. } | Error::SingularJacobian { .. } | Error::DegenerateAnnulus(_)
            | Error::IllConditioned { .. })) => {
            CollapseOutcome::NoSolution { reason: e.to_string() }
        }
        Err(e) => return Err(e),
    };
    Ok(CollapseDiagnostic { k, t, rho_start, outcome })
}

/// Outcome of the a-posteriori checks on a branch point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchCertificate {
    /// Modal residual after re-solving with K_solver + 4 and doubled n_colloc.
    pub refined_residual: f64,
    /// max |u − (|x|² − T(ρ))/(2σ_c)| on a fine sampling of the inner surface.
    pub dirichlet_residual: f64,
    /// max |∂_ν u − ⟨x, ν⟩| on the same sampling.
    pub flux_residual: f64,
    /// Largest value of u over the interior sample.
    pub max_interior_u: f64,
    pub interior_samples: usize,
    pub passed: bool,
}

/// Tolerance for the refined residual and the Cauchy-data certificate.
pub const CERTIFICATE_TOL: f64 = 1e-8;

pub fn verify_branch_point(problem: &BranchProblem, point: &BranchPoint) -> Result<BranchCertificate> {
    let domain = point.domain(problem.dim)?;
    let base = problem.settings.solver;
    let refined = SolverSettings { k_solver: base.k_solver + 4, n_colloc: 2 * base.n_colloc };
    let (sol, res) = evaluate_map(&domain, problem.sigma_c, refined)?;
    let refined_residual = res.modal_norm();

    let config = PhaseConfig::new(problem.dim, problem.sigma_c, point.rho)?;
    let transmission = transmission_constant(&config);
    let basis = ZonalBasis::new(problem.dim, domain.max_degree())?;
    // a sampling that avoids the collocation nodes
    let fine = AngularQuadrature::new(problem.dim, 3 * refined.n_colloc + 1)?;
    let inner = domain.inner_surface(&fine, &basis)?.geometry();
    let (mut dirichlet_residual, mut flux_residual) = (0.0f64, 0.0f64);
    for p in &inner {
        let s = sol.sample(p.position);
        let data = (p.position.norm_squared() - transmission) / (2.0 * problem.sigma_c);
        dirichlet_residual = dirichlet_residual.max((s.value - data).abs());
        flux_residual = flux_residual.max((s.gradient.dot(&p.normal) - p.position.dot(&p.normal)).abs());
    }

    let (n_theta, n_r) = (40, 25);
    let mut max_interior_u = f64::NEG_INFINITY;
    for i in 0..n_theta {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / n_theta as f64;
        let r_in = point.rho + basis.expand(&point.eta_hat, theta).0;
        let r_out = 1.0 + basis.expand(&point.xi_hat, theta).0;
        for j in 0..n_r {
            let r = r_in + (r_out - r_in) * (j as f64 + 0.5) / n_r as f64;
            max_interior_u = max_interior_u.max(sol.sample(direction(theta) * r).value);
        }
    }

    let passed = refined_residual <= 2.0 * CERTIFICATE_TOL
        && dirichlet_residual <= CERTIFICATE_TOL
        && flux_residual <= CERTIFICATE_TOL
        && max_interior_u < 0.0;
    Ok(BranchCertificate {
        refined_residual,
        dirichlet_residual,
        flux_residual,
        max_interior_u,
        interior_samples: n_theta * n_r,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem() -> BranchProblem {
        BranchProblem::new(2, 2.0, 2, BranchSettings::for_mode(2)).unwrap()
    }

    #[test]
    fn trivial_point_converges_immediately() {
        let p = problem();
        let z = vec![0.0; 9];
        for rho in [0.5, 0.76, 0.9] {
            let sol = newton_solve(&p, &p.guess(0.0, &z, &z, rho)).unwrap();
            assert_eq!(sol.newton_iters, 0);
            assert_eq!(sol.rho, rho);
            assert!(sol.residual_norm < 1e-12);
        }
    }

    #[test]
    fn small_amplitude_point() {
        let p = problem();
        let (beta, gamma) = kernel_vector(2, 2.0, 2).unwrap();
        let r_star = critical_radius_closed_form(2, 2).unwrap();
        let z = vec![0.0; 9];
        let mut xi = z.clone();
        xi[2] = 1e-3 * gamma / beta;
        let sol = newton_solve(&p, &p.guess(1e-3, &z, &xi, r_star)).unwrap();
        assert!(sol.newton_iters <= 5, "{} iterations", sol.newton_iters);
        assert!(sol.residual_norm <= 1e-9);
        assert_eq!(sol.eta_hat[2], 1e-3);
        let cert = verify_branch_point(&p, &sol).unwrap();
        assert!(cert.passed, "{cert:?}");
        let mut stale = sol.clone();
        stale.eta_hat[2] += 1e-3;
        assert!(!verify_branch_point(&p, &stale).unwrap().passed);
    }

    #[test]
    fn trivial_point_certificate() {
        let p = problem();
        let z = vec![0.0; 9];
        let sol = newton_solve(&p, &p.guess(0.0, &z, &z, 0.6)).unwrap();
        let cert = verify_branch_point(&p, &sol).unwrap();
        assert!(cert.passed && cert.dirichlet_residual < 1e-13 && cert.flux_residual < 1e-12);
    }

    #[test]
    fn rejects_invalid_problems() {
        let s = BranchSettings::for_mode(2);
        assert_eq!(BranchProblem::new(2, 1.0, 2, s).unwrap_err(), Error::SinglePhase);
        assert_eq!(BranchProblem::new(2, 2.0, 1, s).unwrap_err(), Error::NoCriticalRadius(1));
        let narrow = BranchSettings { max_degree: 4, ..s };
        assert!(BranchProblem::new(2, 2.0, 2, narrow).is_err());
    }

    #[test]
    fn low_modes_collapse() {
        for k in [0, 1] {
            let d = branch_collapse(2, 2.0, k, 1e-2, 0.6).unwrap();
            assert!(d.collapsed(), "{d:?}");
        }
    }
}
