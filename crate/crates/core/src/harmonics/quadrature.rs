//! One-dimensional angular quadrature for zonal integrands on S^{N-1}.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1], nodes in decreasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let mf = m as f64;
                let p2 = ((2.0 * mf - 1.0) * x * p1 - (mf - 1.0) * p0) / mf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (x.iter().map(|t| mid + half * t).collect(), w.iter().map(|v| v * half).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    /// Gauss–Legendre in cos θ, θ ∈ (0, π).
    GaussLegendre,
    /// Uniform nodes on [0, 2π), for N = 2.
    PeriodicTrapezoid,
    /// Midpoints of [0, π] carrying twice the weight, exploiting reflection symmetry θ ↦ −θ (N = 2).
    SymmetricMidpoint,
}

/// Quadrature Σ w_j f(θ_j) ≈ ∫_{S^{N-1}} f dS for zonal f; the weights carry |S^{N-2}| sin^{N-2} θ.
#[derive(Debug, Clone)]
pub struct AngularQuadrature {
    dim: usize,
    kind: QuadratureKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl AngularQuadrature {
    /// The general-purpose rule: Gauss–Legendre in cos θ for N = 3, periodic trapezoid for N = 2.
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        match dim {
            2 => Self::build(dim, n, QuadratureKind::PeriodicTrapezoid),
            3 => Self::build(dim, n, QuadratureKind::GaussLegendre),
            _ => Err(Error::UnsupportedDimension(dim)),
        }
    }

    /// Rule restricted to θ ∈ (0, π), valid for zonal (reflection-even) integrands.
    pub fn zonal(dim: usize, n: usize) -> Result<Self> {
        match dim {
            2 => Self::build(dim, n, QuadratureKind::SymmetricMidpoint),
            3 => Self::build(dim, n, QuadratureKind::GaussLegendre),
            _ => Err(Error::UnsupportedDimension(dim)),
        }
    }

    fn build(dim: usize, n: usize, kind: QuadratureKind) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("quadrature needs at least 2 nodes, got {n}")));
        }
        let (nodes, weights) = match kind {
            QuadratureKind::GaussLegendre => {
                let (x, w) = gauss_legendre(n);
                (x.iter().map(|c| c.acos()).collect(), w.iter().map(|v| 2.0 * PI * v).collect())
            }
            QuadratureKind::PeriodicTrapezoid => {
                let h = 2.0 * PI / n as f64;
                ((0..n).map(|j| j as f64 * h).collect(), vec![h; n])
            }
            QuadratureKind::SymmetricMidpoint => {
                let h = PI / n as f64;
                ((0..n).map(|j| (j as f64 + 0.5) * h).collect(), vec![2.0 * h; n])
            }
        };
        Ok(Self { dim, kind, nodes, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Highest degree integrated exactly: cos θ-polynomial degree for Gauss rules,
    /// trigonometric degree for the circle rules.
    pub fn exactness_degree(&self) -> usize {
        let n = self.nodes.len();
        match self.kind {
            QuadratureKind::GaussLegendre => 2 * n - 1,
            QuadratureKind::PeriodicTrapezoid => n - 1,
            QuadratureKind::SymmetricMidpoint => 2 * n - 1,
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}
