//! Acceptance suite: one function per criterion, each returning named checks.
//!
//! The same code backs the `selftest` subcommand and the `acceptance` integration
//! test. A [`Mutation`] perturbs the pipeline on purpose so that the suite can be
//! shown to catch errors.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annulus::{evaluate_map, overdet_residual, solve_dirichlet_with_constant, PerturbedAnnulus, SolverSettings};
use crate::branch::{trace_branch, verify_branch_point, BranchProblem, BranchSettings};
use crate::counterexample::{build_counterexample, level_radius, translate_to_identity_frame, CKConfig};
use crate::error::Result;
use crate::field::ZonalField;
use crate::harmonics::{direction, eigenvalue, AngularQuadrature, Vec2, ZonalBasis};
use crate::identities::{
    grad_xi_iii_closed, term_ii_closed, term_ii_quadrature, term_iii_closed, term_iii_quadrature, OffsetBallConfig,
};
use crate::linearization::{
    critical_radius, critical_radius_closed_form, det_dr_closed_form, det_m, det_m_closed_form, dr_frechet_matrix,
    frechet_matrix, kernel_vector, RootMethod,
};
use crate::radial::{radial_solution, transmission_constant, trivial_residual, PhaseConfig};

/// Deliberate faults injected into the pipeline.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Mutation {
    /// Added to T(ρ) in the inner Dirichlet data of the trivial-branch check.
    pub transmission_offset: f64,
    /// Replaces the node count of the orthonormality quadrature.
    pub angular_order: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelftestOptions {
    pub seed: u64,
    pub parallel: bool,
    pub mutation: Mutation,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self { seed: 20_240_917, parallel: false, mutation: Mutation::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtMost,
    AtLeast,
    Holds,
}

/// A single measured quantity compared against its threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, relation: Relation::AtMost, passed: value <= threshold }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, relation: Relation::AtLeast, passed: value >= threshold }
    }

    pub fn holds(name: &str, ok: bool) -> Self {
        Self { name: name.into(), value: ok as u8 as f64, threshold: 1.0, relation: Relation::Holds, passed: ok }
    }

    fn errored(name: &str, err: &crate::Error) -> Self {
        Self { name: format!("{name} ({err})"), value: f64::NAN, threshold: 0.0, relation: Relation::Holds, passed: false }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "ok" } else { "FAILED" };
        match self.relation {
            Relation::AtMost => write!(f, "{}: {:.3e} <= {:.1e} {status}", self.name, self.value, self.threshold),
            Relation::AtLeast => write!(f, "{}: {:.6e} >= {:.6e} {status}", self.name, self.value, self.threshold),
            Relation::Holds => write!(f, "{}: {status}", self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub checks: Vec<Check>,
    pub elapsed_s: f64,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn summary_line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        format!("criterion {}: {status} ({}, {:.2} s)", self.id, self.title, self.elapsed_s)
    }
}

pub const CRITERIA: [u8; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "critical radii",
        2 => "low modes never bifurcate",
        3 => "radius derivative of the Frechet matrix",
        4 => "Frechet consistency of the discretized map",
        5 => "quadratic tangency at the bifurcation point",
        6 => "nontrivial branch",
        7 => "counterexample domain",
        8 => "integral identity on the counterexample",
        9 => "offset-ball closed forms",
        10 => "foundations",
        _ => "unknown",
    }
}

pub fn run_criterion(id: u8, options: &SelftestOptions) -> CriterionReport {
    let start = Instant::now();
    let checks = match id {
        1 => critical_radii(),
        2 => low_mode_determinants(),
        3 => radius_derivative(),
        4 => frechet_consistency(),
        5 => tangency(),
        6 => branch(),
        7 => counterexample(),
        8 => identity(),
        9 => offset_balls(options.seed),
        10 => foundations(&options.mutation),
        _ => vec![Check::holds(&format!("criterion {id} exists"), false)],
    };
    let elapsed_s = start.elapsed().as_secs_f64();
    CriterionReport { id, title: title(id).into(), checks, elapsed_s }
}

pub fn run_all(options: &SelftestOptions) -> Vec<CriterionReport> {
    if options.parallel {
        CRITERIA.par_iter().map(|&id| run_criterion(id, options)).collect()
    } else {
        CRITERIA.iter().map(|&id| run_criterion(id, options)).collect()
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn collect(name: &str, result: Result<Vec<Check>>) -> Vec<Check> {
    result.unwrap_or_else(|e| vec![Check::errored(name, &e)])
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn critical_radii() -> Vec<Check> {
    let (checks, elapsed) = timed(|| {
        collect("critical radii", (|| {
            let (mut agree, mut spread) = (0.0f64, 0.0f64);
            let mut increasing = true;
            for dim in [2, 3, 4] {
                let mut prev = 0.0;
                for k in 2..=8 {
                    let closed = critical_radius_closed_form(dim, k)?;
                    let mut roots = Vec::new();
                    for sigma in [0.3, 2.0, 7.0] {
                        roots.push(critical_radius(dim, k, RootMethod::RootFound, sigma)?.r_star);
                    }
                    for r in &roots {
                        agree = agree.max((r - closed).abs());
                    }
                    let (lo, hi) = roots.iter().fold((f64::MAX, f64::MIN), |(l, h), &r| (l.min(r), h.max(r)));
                    spread = spread.max(hi - lo);
                    increasing &= closed > prev;
                    prev = closed;
                }
            }
            let r22 = critical_radius_closed_form(2, 2)?;
            let r32 = critical_radius_closed_form(3, 2)?;
            Ok(vec![
                Check::at_most("closed form vs bisection", agree, 1e-10),
                Check::at_most("spread over sigma_c", spread, 1e-12),
                Check::holds("R*(k) strictly increasing", increasing),
                Check::at_most("R*(2, N=2) vs (1/3)^(1/4)", (r22 - (1.0f64 / 3.0).powf(0.25)).abs(), 1e-12),
                Check::at_most("R*(2, N=3) vs (3/8)^(1/5)", (r32 - 0.375f64.powf(0.2)).abs(), 1e-12),
                Check::at_most("R*(2, N=2) vs 0.759836", (r22 - 0.759_836).abs(), 1e-6),
                Check::at_most("R*(2, N=3) vs 0.821876", (r32 - 0.821_876).abs(), 1e-6),
            ])
        })())
    });
    [checks, vec![Check::at_most("runtime [s]", elapsed, 1.0)]].concat()
}

fn low_mode_determinants() -> Vec<Check> {
    collect("low modes", (|| {
        let (mut min_abs, mut closed_err) = (f64::INFINITY, 0.0f64);
        let mut sign_constant = true;
        for dim in [2, 3, 4] {
            for sigma in [0.3, 2.0, 7.0] {
                for k in [0, 1] {
                    let mut sign = 0.0;
                    for i in 0..1000 {
                        let r = 0.01 + 0.98 * i as f64 / 999.0;
                        let d = det_m(dim, sigma, r, k)?;
                        if !d.is_finite() {
                            sign_constant = false;
                        }
                        min_abs = min_abs.min(d.abs());
                        if i == 0 {
                            sign = d.signum();
                        }
                        sign_constant &= d.signum() == sign;
                        if k == 1 {
                            closed_err = closed_err.max(rel(d, det_m_closed_form(dim, sigma, r, 1)?));
                        }
                    }
                }
            }
        }
        Ok(vec![
            Check::holds("det M(R, 0), det M(R, 1) nonzero and of constant sign", min_abs > 0.0 && sign_constant),
            Check::at_most("det M(R, 1) vs closed form (relative)", closed_err, 1e-12),
        ])
    })())
}

/// Central differences of M at step h carry a rounding error of about
/// 2ε·max|M|/h; entries whose derivative sits below that floor are compared
/// against the floor rather than against their own size.
fn radius_derivative() -> Vec<Check> {
    collect("radius derivative", (|| {
        let h = 1e-6;
        let (mut entry_err, mut det_err, mut k1_det) = (0.0f64, 0.0f64, 0.0f64);
        for dim in [2, 3, 4] {
            for sigma in [0.3, 2.0, 7.0] {
                for r in [0.2, 0.5, 0.8] {
                    for k in 0..=10 {
                        let d = dr_frechet_matrix(dim, sigma, r, k)?;
                        let p = frechet_matrix(dim, sigma, r + h, k)?;
                        let m = frechet_matrix(dim, sigma, r - h, k)?;
                        let size = [p.a, p.b, p.c, p.d, m.a, m.b, m.c, m.d].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
                        let floor = 2.0 * f64::EPSILON * size / h;
                        for (exact, fd) in [
                            (d.a, (p.a - m.a) / (2.0 * h)),
                            (d.b, (p.b - m.b) / (2.0 * h)),
                            (d.c, (p.c - m.c) / (2.0 * h)),
                            (d.d, (p.d - m.d) / (2.0 * h)),
                        ] {
                            entry_err = entry_err.max((fd - exact).abs() / (exact.abs() + floor / 1e-6));
                        }
                        let scale = (d.a * d.d).abs() + (d.b * d.c).abs();
                        if k == 1 {
                            k1_det = k1_det.max(d.det().abs() / scale);
                        } else {
                            det_err = det_err.max(rel(d.det(), det_dr_closed_form(dim, sigma, r, k)));
                        }
                    }
                }
            }
        }
        Ok(vec![
            Check::at_most("entrywise d/dR vs central differences (relative, above rounding floor)", entry_err, 1e-6),
            Check::at_most("det of d/dR M vs closed form (relative)", det_err, 1e-10),
            Check::at_most("det of d/dR M at k = 1 (relative to entries)", k1_det, 1e-12),
        ])
    })())
}

/// Central difference of the projected map in one boundary coefficient.
fn directional(dim: usize, sigma: f64, rho: f64, k: usize, inner: bool, settings: SolverSettings) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = 1e-6;
    let n = settings.k_solver - 3;
    let eval = |sign: f64| -> Result<(Vec<f64>, Vec<f64>)> {
        let (mut eta, mut xi) = (vec![0.0; n], vec![0.0; n]);
        if inner {
            eta[k] = sign * h;
        } else {
            xi[k] = sign * h;
        }
        let (_, res) = evaluate_map(&PerturbedAnnulus::new(dim, rho, eta, xi)?, sigma, settings)?;
        Ok((res.f1_hat, res.f2_hat))
    };
    let (p, m) = (eval(1.0)?, eval(-1.0)?);
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) / (2.0 * h)).collect();
    Ok((diff(&p.0, &m.0), diff(&p.1, &m.1)))
}

fn frechet_consistency() -> Vec<Check> {
    let (checks, elapsed) = timed(|| {
        collect("Frechet consistency", (|| {
            let settings = SolverSettings::for_degree(3);
            let (mut err, mut leak) = (0.0f64, 0.0f64);
            for dim in [2, 3] {
                for sigma in [0.5, 2.0] {
                    for rho in [0.4, 0.7] {
                        for k in 0..=3 {
                            let m = frechet_matrix(dim, sigma, rho, k)?;
                            let scale = m.a.abs().max(m.b.abs()).max(m.c.abs()).max(m.d.abs());
                            for (inner, top, bottom) in [(true, m.a, m.c), (false, m.b, m.d)] {
                                let (f1, f2) = directional(dim, sigma, rho, k, inner, settings)?;
                                err = err.max((f1[k] - top).abs().max((f2[k] - bottom).abs()) / scale);
                                for j in (0..f1.len()).filter(|&j| j != k) {
                                    leak = leak.max(f1[j].abs().max(f2[j].abs()) / scale);
                                }
                            }
                        }
                    }
                }
            }
            Ok(vec![
                Check::at_most("directional derivative vs M(rho, k) action (relative)", err, 1e-5),
                Check::at_most("coupling into other modes (relative)", leak, 1e-5),
            ])
        })())
    });
    [checks, vec![Check::at_most("runtime [s]", elapsed, 30.0)]].concat()
}

/// ‖F‖∞ at the nodes for the linear ansatz t(β, γ) in mode k* at ρ = R*.
pub fn linear_ansatz_residual(dim: usize, sigma: f64, k_star: usize, t: f64) -> Result<f64> {
    let (beta, gamma) = kernel_vector(dim, sigma, k_star)?;
    let r_star = critical_radius_closed_form(dim, k_star)?;
    let settings = BranchSettings::for_mode(k_star);
    let n = settings.max_degree + 1;
    let (mut eta, mut xi) = (vec![0.0; n], vec![0.0; n]);
    eta[k_star] = t * beta;
    xi[k_star] = t * gamma;
    let (_, res) = evaluate_map(&PerturbedAnnulus::new(dim, r_star, eta, xi)?, sigma, settings.solver)?;
    Ok(res.sup_norm())
}

fn tangency() -> Vec<Check> {
    collect("tangency", (|| {
        let f = |t: f64| linear_ansatz_residual(2, 2.0, 2, t);
        let (f1, f2, f3) = (f(1e-2)?, f(5e-3)?, f(2.5e-3)?);
        let mut checks = Vec::new();
        for (name, ratio) in [("halving ratio from t = 1e-2", f1 / f2), ("halving ratio from t = 5e-3", f2 / f3)] {
            checks.push(Check::at_least(&format!("{name} (lower)"), ratio, 3.5));
            checks.push(Check::at_most(&format!("{name} (upper)"), ratio, 4.5));
        }
        Ok(checks)
    })())
}

/// Peak-to-peak variation of r = 1 + Σ ξ̂_k Y_k over [0, π].
pub fn outer_oscillation(dim: usize, xi_hat: &[f64]) -> Result<f64> {
    let basis = ZonalBasis::new(dim, xi_hat.len() - 1)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=2000 {
        let r = 1.0 + basis.expand(xi_hat, PI * i as f64 / 2000.0).0;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(hi - lo)
}

fn branch() -> Vec<Check> {
    let (checks, elapsed) = timed(|| {
        collect("branch", (|| {
            let (t_max, steps) = (0.02, 10);
            let settings = BranchSettings::for_mode(2);
            let diagram = trace_branch(2, 2.0, 2, t_max, steps, settings)?;
            let last = diagram.last();
            let max_modal = diagram.points.iter().map(|p| p.residual_norm).fold(0.0, f64::max);
            let max_sup = diagram.points.iter().map(|p| p.residual_sup).fold(0.0, f64::max);
            let mut checks = vec![
                Check::holds("traced to t_max", diagram.is_complete() && last.t == t_max),
                Check::at_most("continuation steps", (diagram.points.len() - 1) as f64, 10.0),
                Check::at_most("max modal residual", max_modal, 1e-8),
                Check::at_most("max nodal residual", max_sup, 1e-8),
                Check::holds("final eta_2 pinned to t_max", last.eta_hat[2] == t_max),
            ];
            match diagram.tangent {
                Some(tan) => {
                    checks.push(Check::at_most("tangent ratio vs gamma/beta at t = 1e-3", tan.relative_error, 0.1));
                    let osc = outer_oscillation(2, &last.xi_hat)?;
                    checks.push(Check::at_least(
                        "outer oscillation / (|gamma/beta| t)",
                        osc / (tan.kernel_ratio.abs() * last.t),
                        1.5,
                    ));
                }
                None => checks.push(Check::holds("tangent probe converged", false)),
            }
            let problem = BranchProblem::new(2, 2.0, 2, settings)?;
            let cert = verify_branch_point(&problem, last)?;
            checks.extend([
                Check::at_most("refined residual", cert.refined_residual, 2e-8),
                Check::at_most("Dirichlet certificate", cert.dirichlet_residual, 1e-8),
                Check::at_most("flux certificate", cert.flux_residual, 1e-8),
                Check::holds("u < 0 at interior samples", cert.max_interior_u < 0.0),
            ]);
            Ok(checks)
        })())
    });
    [checks, vec![Check::at_most("runtime [s]", elapsed, 120.0)]].concat()
}

/// The counterexample used by criteria 7 and 8.
pub fn reference_counterexample() -> Result<CKConfig> {
    CKConfig::resolve(2, 2.0, 1.0, None, Some(0.1), Some(1.0))
}

fn bisect_level(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn counterexample() -> Vec<Check> {
    let (checks, elapsed) = timed(|| {
        collect("counterexample", (|| {
            let cfg = reference_counterexample()?;
            let quad = AngularQuadrature::zonal(2, 64)?;
            let domain = build_counterexample(&cfg, &quad)?;
            let sol = &domain.solution;
            let (r, eps, sigma, gamma) = (cfg.radius, cfg.epsilon, cfg.sigma_c, cfg.gamma);
            // on the axis θ = π/2 the modal part vanishes and u = ρ²/2 + a₀
            let a0 = (r * r + eps * eps) / (2.0 * sigma) - r * r / 2.0;
            let r_half = (2.0 * (gamma - a0)).sqrt();
            let level = |theta: f64| bisect_level(|s| sol.value(s, theta) - gamma, r, cfg.r2);
            let (oracle_zero, oracle_pi) = (level(0.0), level(PI));
            let r_zero = level_radius(sol, &cfg, gamma, 0.0)?;
            let r_pi = level_radius(sol, &cfg, gamma, PI)?;

            let centre = Vec2::new(eps, 0.0);
            let mut gradient_spread = 0.0f64;
            for frac in [0.2, 0.5, 0.8] {
                let norms: Vec<f64> =
                    (0..64).map(|i| sol.interior(centre + direction(2.0 * PI * i as f64 / 64.0) * frac * r).1.norm()).collect();
                let (lo, hi) = norms.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
                gradient_spread = gradient_spread.max(hi - lo);
            }
            Ok(vec![
                Check::at_most("r(pi/2) vs analytic", (level_radius(sol, &cfg, gamma, PI / 2.0)? - r_half).abs(), 1e-6),
                Check::at_most("r(pi/2) vs 1.579557", (r_half - 1.579_557).abs(), 1e-6),
                Check::at_most("r(0) vs bisection oracle", (r_zero - oracle_zero).abs(), 1e-3),
                Check::at_most("r(pi) vs bisection oracle", (r_pi - oracle_pi).abs(), 1e-3),
                Check::at_most("r(0) vs 1.6467", (r_zero - 1.6467).abs(), 1e-3),
                Check::at_most("r(pi) vs 1.5167", (r_pi - 1.5167).abs(), 1e-3),
                Check::at_most("interior |grad u| spread on circles about eps e1", gradient_spread, 1e-13),
                Check::at_least("outer flux standard deviation", domain.outer_flux_std, 0.01),
                Check::holds("outer boundary is not a circle about the origin", !domain.is_ball_about_origin()),
                Check::holds("outer boundary is not a circle about eps e1", !domain.is_ball_about_shifted_center()),
            ])
        })())
    });
    [checks, vec![Check::at_most("runtime [s]", elapsed, 1.0)]].concat()
}

/// Relative residual of the identity on the reference counterexample.
pub fn identity_residual(angular_order: usize, radial_order: usize, xi: f64) -> Result<f64> {
    let cfg = reference_counterexample()?;
    let quad = AngularQuadrature::zonal(2, angular_order)?;
    let frame = translate_to_identity_frame(&build_counterexample(&cfg, &quad)?, &quad)?;
    Ok(frame.verify(xi, radial_order)?.relative_residual)
}

fn identity() -> Vec<Check> {
    collect("identity", (|| {
        let mut checks = Vec::new();
        for xi in [0.0, 1.0, -0.3] {
            checks.push(Check::at_most(&format!("relative residual, xi = {xi}, orders 64/32"), identity_residual(64, 32, xi)?, 1e-6));
            let (coarse, fine) = (identity_residual(16, 32, xi)?, identity_residual(32, 32, xi)?);
            checks.push(Check::at_least(&format!("improvement 16 -> 32, xi = {xi}"), coarse / fine, 10.0));
        }
        Ok(checks)
    })())
}

fn offset_balls(seed: u64) -> Vec<Check> {
    collect("offset balls", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut ii_err, mut iii_err, mut grad_err) = (0.0f64, 0.0f64, 0.0f64);
        let mut nonzero_off_centre = true;
        let h = 1e-3;
        for _ in 0..50 {
            let dim = if rng.random_bool(0.5) { 2 } else { 3 };
            let sigma = loop {
                let s = rng.random_range(0.2..5.0);
                if (s - 1.0f64).abs() > 0.05 {
                    break s;
                }
            };
            let z: f64 = rng.random_range(-0.6..0.6);
            let lambda = rng.random_range(1.0 + z.abs() + 0.05..2.5);
            let xi = rng.random_range(-1.0..1.0);
            let cfg = OffsetBallConfig::new(dim, sigma, z, lambda)?;
            let pts = cfg.surface(&AngularQuadrature::zonal(dim, 64)?)?.geometry();
            let u = cfg.interior_values(&pts);
            ii_err = ii_err.max(rel(term_ii_quadrature(&pts, dim, sigma, lambda * lambda), term_ii_closed(&cfg)));
            iii_err = iii_err.max(rel(term_iii_quadrature(&pts, &u, dim, sigma, xi)?, term_iii_closed(&cfg, xi)));
            let fd = (term_iii_quadrature(&pts, &u, dim, sigma, xi + h)? - term_iii_quadrature(&pts, &u, dim, sigma, xi - h)?)
                / (2.0 * h);
            grad_err = grad_err.max(rel(fd, grad_xi_iii_closed(&cfg)));
            nonzero_off_centre &= grad_xi_iii_closed(&cfg) != 0.0;
        }
        let mut centred_max = 0.0f64;
        for (dim, sigma) in [(2, 0.4), (3, 3.0)] {
            let cfg = OffsetBallConfig::new(dim, sigma, 0.0, 1.5)?;
            let pts = cfg.surface(&AngularQuadrature::zonal(dim, 64)?)?.geometry();
            let u = cfg.interior_values(&pts);
            let fd = (term_iii_quadrature(&pts, &u, dim, sigma, h)? - term_iii_quadrature(&pts, &u, dim, sigma, -h)?) / (2.0 * h);
            centred_max = centred_max.max(fd.abs()).max(grad_xi_iii_closed(&cfg).abs());
        }
        Ok(vec![
            Check::at_most("term II closed vs quadrature (relative)", ii_err, 1e-10),
            Check::at_most("term III closed vs quadrature (relative)", iii_err, 1e-10),
            Check::at_most("grad_xi III closed vs finite differences (relative)", grad_err, 1e-8),
            Check::holds("grad_xi III nonzero for z != 0", nonzero_off_centre),
            Check::at_most("grad_xi III at z = 0", centred_max, 1e-13),
        ])
    })())
}

/// Largest |∫ Y_j Y_k dS − δ_jk| over degrees up to `max_degree`.
pub fn orthonormality_error(dim: usize, max_degree: usize, nodes: usize) -> Result<f64> {
    let basis = ZonalBasis::new(dim, max_degree)?;
    let quad = AngularQuadrature::zonal(dim, nodes)?;
    let values: Vec<Vec<f64>> = quad.nodes().iter().map(|&t| basis.eval_all(t).value).collect();
    let mut err = 0.0f64;
    for j in 0..=max_degree {
        for k in 0..=j {
            let gram: f64 = values.iter().zip(quad.weights()).map(|(v, w)| w * v[j] * v[k]).sum();
            err = err.max((gram - if j == k { 1.0 } else { 0.0 }).abs());
        }
    }
    Ok(err)
}

/// Node count of the orthonormality check. Products of degree ≤ 2K are integrated
/// exactly from K + 1 nodes; the default doubles that.
pub fn default_orthonormality_nodes(max_degree: usize) -> usize {
    2 * max_degree + 2
}

fn foundations(mutation: &Mutation) -> Vec<Check> {
    collect("foundations", (|| {
        let max_degree = 12;
        let nodes = mutation.angular_order.unwrap_or(default_orthonormality_nodes(max_degree));
        let (mut ortho, mut eigen) = (0.0f64, 0.0f64);
        for dim in [2, 3] {
            ortho = ortho.max(orthonormality_error(dim, max_degree, nodes)?);
            let basis = ZonalBasis::new(dim, max_degree)?;
            for i in 1..50 {
                let theta = PI * i as f64 / 50.0;
                for k in 0..=max_degree {
                    let y = basis.eval(k, theta)?;
                    eigen = eigen.max((basis.laplace_beltrami(k, theta)? + eigenvalue(k, dim) * y).abs());
                }
            }
        }

        let (mut trivial, mut radial, mut max_u) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
        let settings = SolverSettings::for_degree(4);
        for dim in [2, 3] {
            for sigma in [0.3, 2.0, 7.0] {
                for rho in [0.3, 0.5, 0.7, 0.9] {
                    let config = PhaseConfig::new(dim, sigma, rho)?;
                    let (r1, r2) = trivial_residual(&config);
                    radial = radial.max(r1.abs()).max(r2.abs());
                    let domain = PerturbedAnnulus::trivial(dim, rho, 4)?;
                    let t = transmission_constant(&config) + mutation.transmission_offset;
                    let sol = solve_dirichlet_with_constant(&domain, sigma, t, settings)?;
                    let res = overdet_residual(&sol, &domain, settings)?;
                    trivial = trivial.max(res.modal_norm()).max(res.sup_norm());
                    let exact = radial_solution(&config);
                    for i in 0..20 {
                        let theta = PI * (i as f64 + 0.5) / 20.0;
                        for j in 0..20 {
                            let r = rho + (1.0 - rho) * (j as f64 + 0.5) / 20.0;
                            max_u = max_u.max(sol.sample(direction(theta) * r).value).max(exact.value(r));
                        }
                    }
                }
            }
        }
        Ok(vec![
            Check::at_most("orthonormality", ortho, 1e-12),
            Check::at_most("Laplace-Beltrami eigenrelation", eigen, 1e-6),
            Check::at_most("radial solution residual", radial, 1e-12),
            Check::at_most("trivial-branch residual of the discretized map", trivial, 1e-12),
            Check::holds("u < 0 at interior samples", max_u < 0.0),
        ])
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn foundations_with(mutation: Mutation) -> CriterionReport {
        run_criterion(10, &SelftestOptions { mutation, ..Default::default() })
    }

    #[test]
    fn foundations_pass_unmutated() {
        assert!(foundations_with(Mutation::default()).passed());
    }

    #[test]
    fn transmission_mutation_is_caught() {
        let report = foundations_with(Mutation { transmission_offset: 1e-6, angular_order: None });
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(failed, ["trivial-branch residual of the discretized map"]);
    }

    #[test]
    fn reduced_quadrature_is_caught() {
        // 12 nodes cannot integrate Y_12² exactly
        let report = foundations_with(Mutation { transmission_offset: 0.0, angular_order: Some(12) });
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(failed, ["orthonormality"]);
        assert!(orthonormality_error(3, 12, 13).unwrap() < 1e-12);
    }

    #[test]
    fn checks_compare_in_the_stated_direction() {
        assert!(Check::at_most("x", 1.0, 1.0).passed && !Check::at_most("x", 1.1, 1.0).passed);
        assert!(Check::at_least("x", 1.5, 1.5).passed && !Check::at_least("x", 1.4, 1.5).passed);
        assert!(!Check::at_most("x", f64::NAN, 1.0).passed);
    }
}
