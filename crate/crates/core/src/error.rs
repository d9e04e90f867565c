use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("gram matrix is not Hermitian (deviation {deviation:.3e})")]
    NonHermitianGram { deviation: f64 },

    #[error("gram matrix is singular (smallest singular value {sigma_min:.3e})")]
    SingularGram { sigma_min: f64 },

    #[error("relation is not isometric (Gram difference norm {norm:.3e})")]
    NonIsometric { norm: f64 },

    #[error("relation is not an operator (multivalued part has dimension {mul_dim})")]
    NotAnOperator { mul_dim: usize },

    #[error("(T - {lambda}) has no everywhere-defined inverse")]
    NotInvertible { lambda: Complex64 },

    #[error("degenerate pencil: every point is an eigenvalue")]
    DegeneratePencil,

    #[error("kappa1 = {kappa1} is infeasible (boundary form has {positive} positive and {negative} negative squares)")]
    InfeasibleKappa1 {
        kappa1: usize,
        positive: usize,
        negative: usize,
    },

    #[error("restriction of Gamma_{j} to the defect space at {lambda} is not invertible")]
    GammaNotInvertible { j: usize, lambda: Complex64 },

    #[error("{lambda} is outside the admissible region ({region})")]
    RegionViolation {
        lambda: Complex64,
        region: &'static str,
    },

    #[error("boundary pencil is singular at {lambda}")]
    PencilSingular { lambda: Complex64 },

    #[error("shift point {z0} is inadmissible ({reason})")]
    SingularShift { z0: Complex64, reason: &'static str },

    #[error("characteristic function is undefined at {lambda}")]
    SingularAtLambda { lambda: Complex64 },

    #[error("extension is not regular: complement of the minimal part is not positive definite")]
    NotRegular,

    #[error("incompatible shapes: {0}")]
    IncompatibleShapes(String),

    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}
