//! Shared error type for the whole crate.

/// Matrix entry field of a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryField {
    Real,
    Complex,
    Quaternion,
}

impl std::fmt::Display for EntryField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EntryField::Real => write!(f, "real"),
            EntryField::Complex => write!(f, "complex"),
            EntryField::Quaternion => write!(f, "quaternion"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("ambient coordinate length mismatch: expected {expected}, got {got}")]
    AmbientMismatch { expected: usize, got: usize },

    #[error("vector lies outside the span of the basis (residual {residual:.3e}, tol {tol:.3e})")]
    NotInSpan { residual: f64, tol: f64 },

    #[error("dimension mismatch between domain ({domain}) and codomain ({codomain})")]
    DimensionMismatch { domain: usize, codomain: usize },

    #[error("vectors are numerically rank deficient ({detail})")]
    RankDeficient { detail: String },

    #[error("matrix entries do not match the declared {expected} field")]
    FieldMismatch { expected: EntryField },

    #[error("matrix size mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    SizeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("gram matrix is not symmetric positive definite ({detail})")]
    NotPositiveDefinite { detail: String },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("evaluation mode is not supported by this action kind")]
    UnsupportedMode,

    #[error("element is not in the structure group (membership residual {residual:.3e})")]
    NotInGroup { residual: f64 },

    #[error("weight is not invariant under the group action (residual {residual:.3e})")]
    NonInvariantWeight { residual: f64 },

    #[error("chart parameter outside the chart domain: {0}")]
    ChartDomain(String),

    #[error("unknown instance key `{0}`")]
    UnknownKey(String),

    #[error("invalid instance parameters: {0}")]
    BadParams(String),

    #[error("no closed-form radial density is registered for `{0}`")]
    NoOracle(String),

    #[error("quadrature box too small: boundary shell holds {shell_mass:.3e} of the mass (tol {tol:.3e})")]
    QuadratureDomain { shell_mass: f64, tol: f64 },

    #[error("finite-difference step {h:.3e} underflows at coordinate scale {scale:.3e}")]
    StepUnderflow { h: f64, scale: f64 },

    #[error("unknown test function key `{0}`")]
    UnknownStatistic(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal error: {0}")]
    Internal(String),
}
