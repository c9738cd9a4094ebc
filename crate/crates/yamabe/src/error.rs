//! Crate-wide error type.

/// Errors raised by field evaluation, geometry operations, constructions and
/// the shared numerical kernels.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A quantity that must stay strictly positive (φ or f) dipped to or
    /// below the positivity floor.
    #[error("{what} must be positive, got {value:.6e} at {at}")]
    NonPositive {
        what: &'static str,
        value: f64,
        at: String,
    },

    /// A profile was queried outside its ξ-interval.
    #[error("{what}: ξ = {xi:.6e} outside domain [{lo:.6e}, {hi:.6e}]")]
    OutOfDomain {
        what: &'static str,
        xi: f64,
        lo: f64,
        hi: f64,
    },

    /// Vector/field dimensions disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Signature entries must be exactly ±1 and n ≥ 2.
    #[error("invalid signature: {0}")]
    BadSignature(String),

    /// A residual sweep was asked to run on an empty grid.
    #[error("empty grid")]
    EmptyGrid,

    /// Every grid point was excluded by domain guards or positivity floors.
    #[error("no grid points survived domain filtering ({excluded} excluded)")]
    AllPointsExcluded { excluded: usize },

    /// Adaptive step size shrank below the representable floor.
    #[error("step size underflow at ξ = {xi:.6e}; problem appears singular there")]
    StepUnderflow { xi: f64 },

    /// Adaptive quadrature hit its subdivision limit.
    #[error("quadrature did not converge on [{a:.6e}, {b:.6e}]")]
    QuadratureNonConvergence { a: f64, b: f64 },

    /// Bracketed root finding requires a sign change.
    #[error("no sign change on [{a:.6e}, {b:.6e}]")]
    NoSignChange { a: f64, b: f64 },

    /// A construction degenerated immediately (before leaving the initial point).
    #[error("singular construction at ξ = {xi:.6e}: {reason}")]
    SingularConstruction { xi: f64, reason: String },

    /// Parameter violates a documented invariant.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A requested evaluation box maps outside the profile domain under ξ.
    #[error(
        "box image under ξ = [{img_lo:.6e}, {img_hi:.6e}] escapes profile domain [{lo:.6e}, {hi:.6e}]"
    )]
    DomainMismatch {
        img_lo: f64,
        img_hi: f64,
        lo: f64,
        hi: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
