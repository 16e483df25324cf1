//! The radial (concentric balls) solution of the two-phase torsion problem.
//!
//! Frame: D₀ = B_ρ, Ω₀ = B₁, conductivity σ_c in D₀ and 1 in the shell.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldSample, ZonalField};
use crate::harmonics::Vec2;

/// Physical parameters: dimension, inner conductivity and inner radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    pub dim: usize,
    pub sigma_c: f64,
    pub rho: f64,
}

impl PhaseConfig {
    pub fn new(dim: usize, sigma_c: f64, rho: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")));
        }
        if !(sigma_c > 0.0) || !sigma_c.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma_c must be positive, got {sigma_c}")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter(format!("rho must lie in (0, 1), got {rho}")));
        }
        Ok(Self { dim, sigma_c, rho })
    }

    /// σ_c = 1: the problem is single-phase and the bifurcation formulas degenerate.
    pub fn is_single_phase(&self) -> bool {
        self.sigma_c == 1.0
    }

    /// Reject σ_c = 1 for operations that need a genuine two-phase contrast.
    pub fn require_two_phase(&self) -> Result<()> {
        if self.is_single_phase() {
            Err(Error::SinglePhase)
        } else {
            Ok(())
        }
    }

    /// Rescale to the frame D = B₁, Ω = B_R with R = 1/ρ.
    ///
    /// Returns (R, λ²) where the inner phase reads (|y|² − λ²)/(2σ_c) and
    /// λ² = σ_c R² + 1 − σ_c.
    pub fn unit_inner_frame(&self) -> (f64, f64) {
        let outer = 1.0 / self.rho;
        (outer, self.sigma_c * outer * outer + 1.0 - self.sigma_c)
    }
}

/// T(ρ) = (1 − σ_c) ρ² + σ_c.
pub fn transmission_constant(config: &PhaseConfig) -> f64 {
    (1.0 - config.sigma_c) * config.rho * config.rho + config.sigma_c
}

/// Piecewise-quadratic radial solution.
#[derive(Debug, Clone, Copy)]
pub struct RadialSolution {
    pub config: PhaseConfig,
    pub transmission: f64,
}

pub fn radial_solution(config: &PhaseConfig) -> RadialSolution {
    RadialSolution { config: *config, transmission: transmission_constant(config) }
}

impl RadialSolution {
    fn inside(&self, r: f64) -> bool {
        r < self.config.rho
    }

    pub fn value(&self, r: f64) -> f64 {
        if self.inside(r) {
            (r * r - self.transmission) / (2.0 * self.config.sigma_c)
        } else {
            (r * r - 1.0) / 2.0
        }
    }

    /// Value approached from inside D₀ (r ≤ ρ formula, used at r = ρ).
    pub fn inner_value(&self, r: f64) -> f64 {
        (r * r - self.transmission) / (2.0 * self.config.sigma_c)
    }

    pub fn outer_value(&self, r: f64) -> f64 {
        (r * r - 1.0) / 2.0
    }

    pub fn derivative(&self, r: f64) -> f64 {
        if self.inside(r) {
            r / self.config.sigma_c
        } else {
            r
        }
    }

    /// Radial Laplacian u″ + (N − 1)u′/r, equal to N/σ piecewise.
    pub fn laplacian(&self, r: f64) -> f64 {
        let n = self.config.dim as f64;
        if self.inside(r) {
            (1.0 + (n - 1.0)) / self.config.sigma_c
        } else {
            1.0 + (n - 1.0)
        }
    }

    /// Residuals of the Dirichlet, continuity and flux-jump conditions.
    pub fn interface_residuals(&self) -> [f64; 3] {
        let rho = self.config.rho;
        [
            self.outer_value(1.0).abs(),
            (self.inner_value(rho) - self.outer_value(rho)).abs(),
            (self.config.sigma_c * (rho / self.config.sigma_c) - rho).abs(),
        ]
    }
}

/// Outer-phase field (|x|² − 1)/2, exact in the shell.
impl ZonalField for RadialSolution {
    fn dim(&self) -> usize {
        self.config.dim
    }

    fn sample(&self, point: Vec2) -> FieldSample {
        FieldSample {
            value: (point.norm_squared() - 1.0) / 2.0,
            gradient: point,
            hessian: Matrix2::identity(),
            azimuthal: 1.0,
        }
    }
}

/// (sup over ∂D₀ of |u_ν − ⟨x, ν⟩|, sup over ∂Ω₀ of |u_ν − 1|) on the trivial branch.
pub fn trivial_residual(config: &PhaseConfig) -> (f64, f64) {
    let sol = radial_solution(config);
    let rho = config.rho;
    ((sol.derivative(rho) - rho).abs(), (sol.derivative(1.0) - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transmission_examples() {
        let c = PhaseConfig::new(3, 2.0, 0.5).unwrap();
        assert!((transmission_constant(&c) - 1.75).abs() < 1e-15);
        for rho in [0.1, 0.5, 0.9] {
            assert_eq!(transmission_constant(&PhaseConfig::new(2, 1.0, rho).unwrap()), 1.0);
        }
        let near = PhaseConfig::new(2, 3.0, 1.0 - 1e-12).unwrap();
        assert!((transmission_constant(&near) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn continuity_and_flux_at_interface() {
        let s = radial_solution(&PhaseConfig::new(2, 2.0, 0.5).unwrap());
        assert_eq!(s.outer_value(1.0), 0.0);
        assert!((s.outer_value(0.5) + 0.375).abs() < 1e-15);
        assert!((s.inner_value(0.5) + 0.375).abs() < 1e-15);
        assert!((s.derivative(0.5) - 0.5).abs() < 1e-15);
        assert!((2.0 * s.derivative(0.499_999_999) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn trivial_residual_vanishes() {
        for (sigma, rho) in [(2.0, 0.5), (0.5, 0.9), (5.0, 0.1)] {
            let (r1, r2) = trivial_residual(&PhaseConfig::new(3, sigma, rho).unwrap());
            assert!(r1 <= 1e-14 && r2 <= 1e-14);
        }
    }

    #[test]
    fn rejects_bad_config() {
        assert!(PhaseConfig::new(1, 2.0, 0.5).is_err());
        assert!(PhaseConfig::new(2, 0.0, 0.5).is_err());
        assert!(PhaseConfig::new(2, 2.0, 1.0).is_err());
        assert!(PhaseConfig::new(2, 2.0, 0.0).is_err());
        assert_eq!(PhaseConfig::new(2, 1.0, 0.5).unwrap().require_two_phase(), Err(Error::SinglePhase));
    }

    #[test]
    fn unit_inner_frame_matches_interior_quadratic() {
        let c = PhaseConfig::new(3, 2.5, 0.4).unwrap();
        let (outer, lambda_sq) = c.unit_inner_frame();
        let t = transmission_constant(&c);
        assert!((lambda_sq - t / (c.rho * c.rho)).abs() < 1e-13);
        assert!((outer - 2.5).abs() < 1e-15);
    }
}
