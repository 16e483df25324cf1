//! Command-line front end. The `twophase` binary only forwards to [`main`].
//!
//! Every flag may also be given in a JSON file passed with `--config`; keys use
//! the flag names (`"sigma-c": 2.0`) and flags on the command line win.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branch::{trace_branch, verify_branch_point, BranchCertificate, BranchDiagram, BranchProblem, BranchSettings};
use crate::counterexample::{build_counterexample, translate_to_identity_frame, CKConfig, CounterexampleDomain};
use crate::error::Error;
use crate::harmonics::AngularQuadrature;
use crate::identities::IdentityReport;
use crate::linearization::{
    critical_radius, critical_radius_closed_form, det_dr_closed_form, det_m, kernel_vector, RootMethod,
};
use crate::selftest::{run_all, CriterionReport, Mutation, SelftestOptions};

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_ACCEPTANCE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "twophase", version, about = "Bifurcation, identities and counterexamples for the two-phase overdetermined torsion problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Table of R*(k): closed form, bisection root, kernel direction and transversality.
    CriticalRadii,
    /// det M(R, k) on a radius grid for every k up to --mode-k (heatmap data).
    BifurcationScan,
    /// Continue the branch bifurcating at R*(--mode-k) up to --t-max.
    TraceBranch,
    /// Build the shifted-ball counterexample domain and its diagnostics.
    Counterexample,
    /// Check the integral identity on the counterexample and the offset-ball closed forms.
    VerifyIdentities,
    /// Run the acceptance suite.
    Selftest,
}

/// Flags shared by all subcommands. Unset flags fall back to the config file,
/// then to the per-command defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true)]
    pub sigma_c: Option<f64>,
    /// Inner radius: ρ of the annulus, or R of the counterexample ball.
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    /// Bifurcating mode k* (trace-branch) or largest degree (critical-radii, bifurcation-scan).
    #[arg(long, global = true)]
    pub mode_k: Option<usize>,
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    /// Continuation steps (trace-branch) or radius samples (bifurcation-scan).
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// A number or "auto".
    #[arg(long, global = true)]
    pub epsilon: Option<String>,
    /// A number or "auto".
    #[arg(long, global = true)]
    pub gamma: Option<String>,
    #[arg(long, global = true)]
    pub angular_order: Option<usize>,
    #[arg(long, global = true)]
    pub radial_order: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub parallel: bool,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Offset added to T(ρ) in the selftest trivial-branch check (mutation testing).
    #[arg(long, global = true, hide = true)]
    pub mutate_transmission: Option<f64>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub dim: Option<usize>,
    pub sigma_c: Option<f64>,
    pub rho: Option<f64>,
    pub mode_k: Option<usize>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub epsilon: Option<Auto>,
    pub gamma: Option<Auto>,
    pub angular_order: Option<usize>,
    pub radial_order: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub parallel: Option<bool>,
}

/// A value that may be left for the program to choose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Auto {
    Value(f64),
    Keyword(AutoKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoKeyword {
    Auto,
}

impl Auto {
    fn parse(s: &str) -> Result<Self, Error> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Auto::Keyword(AutoKeyword::Auto));
        }
        s.parse().map(Auto::Value).map_err(|_| Error::InvalidParameter(format!("expected a number or \"auto\", got {s:?}")))
    }

    fn value(self) -> Option<f64> {
        match self {
            Auto::Value(v) => Some(v),
            Auto::Keyword(_) => None,
        }
    }
}

/// Flags merged over the config file; `None` means the command default applies.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub dim: Option<usize>,
    pub sigma_c: Option<f64>,
    pub rho: Option<f64>,
    pub mode_k: Option<usize>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
    pub angular_order: Option<usize>,
    pub radial_order: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub parallel: bool,
    pub mutate_transmission: Option<f64>,
}

impl RunConfig {
    pub fn merge(flags: &Flags, file: FileConfig) -> Result<Self, Error> {
        let auto = |flag: &Option<String>, file: Option<Auto>| -> Result<Option<f64>, Error> {
            Ok(match flag {
                Some(s) => Auto::parse(s)?.value(),
                None => file.and_then(Auto::value),
            })
        };
        Ok(Self {
            dim: flags.dim.or(file.dim),
            sigma_c: flags.sigma_c.or(file.sigma_c),
            rho: flags.rho.or(file.rho),
            mode_k: flags.mode_k.or(file.mode_k),
            t_max: flags.t_max.or(file.t_max),
            steps: flags.steps.or(file.steps),
            epsilon: auto(&flags.epsilon, file.epsilon)?,
            gamma: auto(&flags.gamma, file.gamma)?,
            angular_order: flags.angular_order.or(file.angular_order),
            radial_order: flags.radial_order.or(file.radial_order),
            tol: flags.tol.or(file.tol),
            out: flags.out.clone().or(file.out),
            seed: flags.seed.or(file.seed),
            parallel: flags.parallel || file.parallel.unwrap_or(false),
            mutate_transmission: flags.mutate_transmission,
        })
    }
}

pub fn load_config(path: &Path) -> Result<FileConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(format!("bad config {}: {e}", path.display())))
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Solver(String),
    Acceptance(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) | Failure::Io(_) => EXIT_VALIDATION,
            Failure::Solver(_) => EXIT_SOLVER,
            Failure::Acceptance(_) => EXIT_ACCEPTANCE,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "validation error: {m}"),
            Failure::Solver(m) => write!(f, "solver failure: {m}"),
            Failure::Acceptance(m) => write!(f, "acceptance failure: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoBracket(_)
            | Error::DegenerateAnnulus(_)
            | Error::IllConditioned { .. }
            | Error::NewtonDiverged { .. }
            | Error::SingularJacobian { .. }
            | Error::UnderResolved { .. } => Failure::Solver(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// What a command produced: a CSV table, a JSON document, or both.
#[derive(Debug, Default)]
pub struct Output {
    pub csv: Option<String>,
    pub json: Option<String>,
    /// Human-readable lines for stderr.
    pub log: Vec<String>,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn validate_dim(dim: usize, allowed: &[usize]) -> Result<usize, Failure> {
    if allowed.contains(&dim) {
        Ok(dim)
    } else {
        Err(Failure::Validation(format!("--dim {dim} is not one of {allowed:?}")))
    }
}

pub fn critical_radii(cfg: &RunConfig) -> Result<Output, Failure> {
    let dims = match cfg.dim {
        Some(d) => vec![validate_dim(d, &[2, 3, 4])?],
        None => vec![2, 3, 4],
    };
    let sigma = cfg.sigma_c.unwrap_or(2.0);
    let k_max = cfg.mode_k.unwrap_or(8);
    if k_max < 2 {
        return Err(Failure::Validation("--mode-k must be at least 2".into()));
    }
    let jobs: Vec<(usize, usize)> = dims.iter().flat_map(|&d| (2..=k_max).map(move |k| (d, k))).collect();
    let row = |&(dim, k): &(usize, usize)| -> Result<Vec<String>, Error> {
        let closed = critical_radius_closed_form(dim, k)?;
        let root = critical_radius(dim, k, RootMethod::RootFound, sigma)?.r_star;
        let (beta, gamma) = kernel_vector(dim, sigma, k)?;
        Ok(vec![
            dim.to_string(),
            k.to_string(),
            num(sigma),
            num(closed),
            num(root),
            num((root - closed).abs()),
            num(beta),
            num(gamma),
            num(det_dr_closed_form(dim, sigma, closed, k)),
        ])
    };
    let rows: Result<Vec<_>, Error> =
        if cfg.parallel { jobs.par_iter().map(row).collect() } else { jobs.iter().map(row).collect() };
    let header = ["dim", "k", "sigma_c", "r_star_closed", "r_star_root", "abs_diff", "beta", "gamma", "det_dr_m"];
    Ok(Output { csv: Some(csv_table(&header, rows?)?), ..Output::default() })
}

pub fn bifurcation_scan(cfg: &RunConfig) -> Result<Output, Failure> {
    let dim = validate_dim(cfg.dim.unwrap_or(2), &[2, 3, 4])?;
    let sigma = cfg.sigma_c.unwrap_or(2.0);
    let k_max = cfg.mode_k.unwrap_or(8);
    let samples = cfg.steps.unwrap_or(200);
    if samples < 2 {
        return Err(Failure::Validation("--steps must be at least 2".into()));
    }
    let scan = |k: usize| -> Result<Vec<Vec<String>>, Error> {
        (0..samples)
            .map(|i| {
                let r = 0.01 + 0.98 * i as f64 / (samples - 1) as f64;
                let d = det_m(dim, sigma, r, k)?;
                Ok(vec![dim.to_string(), num(sigma), k.to_string(), num(r), num(d), num(d.signum())])
            })
            .collect()
    };
    let blocks: Result<Vec<_>, Error> =
        if cfg.parallel { (0..=k_max).into_par_iter().map(scan).collect() } else { (0..=k_max).map(scan).collect() };
    let header = ["dim", "sigma_c", "k", "radius", "det_m", "sign"];
    Ok(Output { csv: Some(csv_table(&header, blocks?.into_iter().flatten())?), ..Output::default() })
}

#[derive(Debug, Serialize)]
struct BranchReport<'a> {
    diagram: &'a BranchDiagram,
    certificate: Option<BranchCertificate>,
}

pub fn trace(cfg: &RunConfig) -> Result<Output, Failure> {
    let dim = validate_dim(cfg.dim.unwrap_or(2), &[2, 3])?;
    let sigma = cfg.sigma_c.unwrap_or(2.0);
    let k_star = cfg.mode_k.unwrap_or(2);
    let t_max = cfg.t_max.unwrap_or(0.02);
    let steps = cfg.steps.unwrap_or(10);
    let mut settings = BranchSettings::for_mode(k_star);
    if let Some(tol) = cfg.tol {
        settings.tol = tol;
    }
    if let Some(n) = cfg.angular_order {
        settings.solver.n_colloc = n;
    }
    let diagram = trace_branch(dim, sigma, k_star, t_max, steps, settings)?;
    let problem = BranchProblem::new(dim, sigma, k_star, settings)?;
    let certificate = verify_branch_point(&problem, diagram.last()).ok();
    let rows = diagram.points.iter().map(|p| {
        vec![
            num(p.t),
            num(p.rho),
            num(p.rho - diagram.r_star),
            num(p.eta_hat[k_star]),
            num(p.xi_hat[k_star]),
            num(p.residual_norm),
            num(p.residual_sup),
            p.newton_iters.to_string(),
        ]
    });
    let header = ["t", "rho", "rho_minus_r_star", "eta_k", "xi_k", "residual_modal", "residual_sup", "newton_iters"];
    let mut out = Output {
        csv: Some(csv_table(&header, rows)?),
        json: Some(json(&BranchReport { diagram: &diagram, certificate })?),
        log: Vec::new(),
    };
    if let Some(f) = &diagram.failure {
        out.log.push(format!("continuation stopped early: {f}"));
    }
    Ok(out)
}

fn ck_config(cfg: &RunConfig) -> Result<CKConfig, Error> {
    let dim = cfg.dim.unwrap_or(2);
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    CKConfig::resolve(dim, cfg.sigma_c.unwrap_or(2.0), cfg.rho.unwrap_or(1.0), None, cfg.epsilon, cfg.gamma)
}

#[derive(Debug, Serialize)]
struct CounterexampleReport<'a> {
    config: CKConfig,
    a0: f64,
    a1: f64,
    b1: f64,
    r_at_zero: f64,
    r_at_pi: f64,
    asphericity_origin: f64,
    asphericity_shifted: f64,
    axial_defect_origin: f64,
    axial_defect_shifted: f64,
    outer_flux_std: f64,
    interior_gradient_std: f64,
    transmission_residual: (f64, f64),
    is_ball_about_origin: bool,
    is_ball_about_shifted_center: bool,
    monotonicity: &'a crate::counterexample::MonotonicityCheck,
    gap: &'a crate::counterexample::GapCheck,
}

impl<'a> From<&'a CounterexampleDomain> for CounterexampleReport<'a> {
    fn from(d: &'a CounterexampleDomain) -> Self {
        Self {
            config: d.config,
            a0: d.solution.a0,
            a1: d.solution.a1,
            b1: d.solution.b1,
            r_at_zero: d.r_at_zero,
            r_at_pi: d.r_at_pi,
            asphericity_origin: d.asphericity_origin,
            asphericity_shifted: d.asphericity_shifted,
            axial_defect_origin: d.axial_defect_origin,
            axial_defect_shifted: d.axial_defect_shifted,
            outer_flux_std: d.outer_flux_std,
            interior_gradient_std: d.interior_gradient_std,
            transmission_residual: d.transmission_residual,
            is_ball_about_origin: d.is_ball_about_origin(),
            is_ball_about_shifted_center: d.is_ball_about_shifted_center(),
            monotonicity: &d.monotonicity,
            gap: &d.gap,
        }
    }
}

pub fn counterexample(cfg: &RunConfig) -> Result<Output, Failure> {
    let config = ck_config(cfg)?;
    let quad = AngularQuadrature::zonal(config.dim, cfg.angular_order.unwrap_or(64))?;
    let domain = build_counterexample(&config, &quad)?;
    let rows = domain.theta.iter().zip(&domain.radius).zip(&domain.d_radius).map(|((t, r), dr)| {
        vec![num(*t), num(*r), num(*dr), num(r * t.cos()), num(r * t.sin())]
    });
    Ok(Output {
        json: Some(json(&CounterexampleReport::from(&domain))?),
        csv: Some(csv_table(&["theta", "radius", "d_radius", "x_axial", "x_transverse"], rows)?),
        log: Vec::new(),
    })
}

#[derive(Debug, Serialize)]
struct IdentitySummary {
    config: CKConfig,
    angular_order: usize,
    radial_order: usize,
    tol: f64,
    reports: Vec<IdentityReport>,
    offset_balls: Vec<crate::selftest::Check>,
    passed: bool,
}

pub fn verify_identities(cfg: &RunConfig) -> Result<Output, Failure> {
    let config = ck_config(cfg)?;
    let angular_order = cfg.angular_order.unwrap_or(64);
    let radial_order = cfg.radial_order.unwrap_or(32);
    let tol = cfg.tol.unwrap_or(1e-6);
    let quad = AngularQuadrature::zonal(config.dim, angular_order)?;
    let frame = translate_to_identity_frame(&build_counterexample(&config, &quad)?, &quad)?;
    let reports = [0.0, 1.0, -0.3].iter().map(|&xi| frame.verify(xi, radial_order)).collect::<Result<Vec<_>, _>>()?;
    let options = SelftestOptions { seed: cfg.seed.unwrap_or(SelftestOptions::default().seed), ..Default::default() };
    let offset_balls = crate::selftest::run_criterion(9, &options).checks;
    let passed = reports.iter().all(|r| r.relative_residual <= tol) && offset_balls.iter().all(|c| c.passed);
    let summary = IdentitySummary { config, angular_order, radial_order, tol, reports, offset_balls, passed };
    let mut out = Output { json: Some(json(&summary)?), ..Output::default() };
    if !passed {
        out.log.push("identity residual or closed-form check outside tolerance".into());
    }
    Ok(out)
}

pub fn selftest(cfg: &RunConfig) -> (Vec<CriterionReport>, Output) {
    let mutation = Mutation { transmission_offset: cfg.mutate_transmission.unwrap_or(0.0), angular_order: cfg.angular_order };
    let options =
        SelftestOptions { seed: cfg.seed.unwrap_or(SelftestOptions::default().seed), parallel: cfg.parallel, mutation };
    let reports = run_all(&options);
    let mut log = Vec::new();
    for r in &reports {
        log.push(r.summary_line());
        for c in r.failures() {
            log.push(format!("    {c}"));
        }
    }
    let json = json(&reports).ok();
    (reports, Output { json, csv: None, log })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Write the primary artifact to `--out` (or stdout) and the secondary one next to
/// it with the other extension.
fn emit(out: &Output, path: Option<&Path>, primary_is_csv: bool) -> Result<(), Failure> {
    let (primary, secondary, ext) = if primary_is_csv {
        (&out.csv, &out.json, "json")
    } else {
        (&out.json, &out.csv, "csv")
    };
    match path {
        Some(p) => {
            if let Some(text) = primary {
                write_file(p, text)?;
            }
            if let Some(text) = secondary {
                write_file(&p.with_extension(ext), text)?;
            }
        }
        None => {
            if let Some(text) = primary {
                std::io::stdout().write_all(text.as_bytes())?;
            }
        }
    }
    for line in &out.log {
        eprintln!("{line}");
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let file = match &cli.flags.config {
        Some(path) => load_config(path)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::merge(&cli.flags, file)?;
    if let Some(t) = cfg.tol {
        if !(t > 0.0) {
            return Err(Failure::Validation(format!("--tol must be positive, got {t}")));
        }
    }
    let out = cfg.out.as_deref();
    match cli.command {
        Command::CriticalRadii => emit(&critical_radii(&cfg)?, out, true),
        Command::BifurcationScan => emit(&bifurcation_scan(&cfg)?, out, true),
        Command::TraceBranch => {
            let output = trace(&cfg)?;
            emit(&output, out, true)?;
            match output.log.first() {
                Some(msg) => Err(Failure::Solver(msg.clone())),
                None => Ok(()),
            }
        }
        Command::Counterexample => emit(&counterexample(&cfg)?, out, false),
        Command::VerifyIdentities => {
            let output = verify_identities(&cfg)?;
            emit(&output, out, false)?;
            match output.log.first() {
                Some(msg) => Err(Failure::Acceptance(msg.clone())),
                None => Ok(()),
            }
        }
        Command::Selftest => {
            let (reports, output) = selftest(&cfg);
            for line in &output.log {
                println!("{line}");
            }
            if let (Some(p), Some(text)) = (out, &output.json) {
                write_file(p, text)?;
            }
            let failed: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| r.id.to_string()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Acceptance(format!("criteria {} failed", failed.join(", "))))
            }
        }
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code())
        }
    }
}
