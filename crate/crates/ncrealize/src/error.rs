//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by series, realization and spectral computations.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands live over free algebras with different variable counts.
    #[error("alphabet mismatch: expected d = {expected}, found d = {found}")]
    AlphabetMismatch { expected: usize, found: usize },

    /// A word letter lies outside the alphabet `[1, d]`.
    #[error("letter {letter} out of range for alphabet of {d} variables")]
    LetterOutOfRange { letter: u32, d: usize },

    /// Matrix or vector dimensions are inconsistent.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Inversion of a series or realization whose value at 0 is (numerically) zero.
    #[error(
        "not invertible at 0: |constant term| = {magnitude:.3e} below tolerance {tolerance:.3e}"
    )]
    NotInvertibleAtZero { magnitude: f64, tolerance: f64 },

    /// An expression passed to `Inv` vanishes at the origin.
    #[error("subexpression not analytic-invertible at 0: {expr}")]
    NotAnalyticAtZero { expr: String },

    /// The linear pencil at the evaluation point is singular to working precision.
    #[error("singular pencil: reciprocal condition estimate {rcond:.3e}")]
    SingularPencil { rcond: f64 },

    /// The value `f(Y)` at the matrix centre is singular, so no inverse realization exists.
    #[error("not invertible at the matrix centre: reciprocal condition estimate {rcond:.3e}")]
    NotInvertibleAtCentre { rcond: f64 },

    /// The requested degree exceeds the data stored in a truncated series.
    #[error("degree bound {got} too small: construction needs at least {needed}")]
    DegreeTooSmall { needed: usize, got: usize },

    /// A construction would exceed the configured state-dimension cap.
    #[error("state dimension {requested} exceeds cap {cap}; raise the cap to override")]
    DimensionCap { requested: usize, cap: usize },

    /// An eigenvalue or Schur computation failed to converge.
    #[error("eigensolver failure: {0}")]
    EigenFailure(String),

    /// Invalid scalar parameter (for example a Schatten exponent below 1).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Syntax error while parsing an NC rational expression.
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    /// A precondition requiring minimality was violated.
    #[error("realization is not minimal: controllable rank {controllable}, observable rank {observable}, dim {dim}")]
    NotMinimal {
        controllable: usize,
        observable: usize,
        dim: usize,
    },

    /// Realizations that were required to be coefficient-equal differ.
    #[error("coefficient mismatch at word {word:?}: |difference| = {difference:.3e}")]
    CoefficientMismatch { word: Vec<u32>, difference: f64 },

    /// Two minimal realizations of equal dimension failed the similarity recovery.
    #[error("no similarity found: residual {residual:.3e} above tolerance {tolerance:.3e}")]
    NotSimilar { residual: f64, tolerance: f64 },

    /// Structural mismatch (e.g. minimal realizations of different state dimensions).
    #[error("structural error: {0}")]
    Structural(String),
}

pub type Result<T> = std::result::Result<T, Error>;
