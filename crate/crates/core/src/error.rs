use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degree {degree} is out of range for a basis truncated at {max_degree}")]
    DegreeOutOfRange { degree: usize, max_degree: usize },

    #[error("dimension N = {0} is not supported by quadrature-backed computations (N must be 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("nonpositive radius {radius} at polar angle {theta}")]
    NonpositiveRadius { radius: f64, theta: f64 },

    #[error("sample arrays have mismatched lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("single-phase conductivity sigma_c = 1 makes this operation degenerate")]
    SinglePhase,

    #[error("no critical radius exists for degree k = {0} (requires k >= 2)")]
    NoCriticalRadius(usize),

    #[error("root bracketing failed: {0}")]
    NoBracket(String),

    #[error("degenerate annulus: {0}")]
    DegenerateAnnulus(String),

    #[error(
        "collocation matrix is ill-conditioned (condition estimate {condition:.3e}); \
         raise n_colloc or lower K_solver"
    )]
    IllConditioned { condition: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("Newton Jacobian is singular (condition estimate {condition:.3e})")]
    SingularJacobian { condition: f64 },

    #[error("level value {gamma} lies outside the admissible gap ({lower}, {upper})")]
    LevelOutsideGap { gamma: f64, lower: f64, upper: f64 },

    #[error("inadmissible counterexample parameters: {0}")]
    Inadmissible(String),

    #[error("quadrature under-resolved: estimates {coarse:.6e} and {fine:.6e} differ beyond tolerance")]
    UnderResolved { coarse: f64, fine: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
