use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point is not on the unit sphere or normal is not unit/orthogonal (defect {defect:e})")]
    InvalidFrame { defect: f64 },

    #[error("shape matrix is not symmetric (asymmetry {asymmetry:e})")]
    NonSymmetricShape { asymmetry: f64 },

    #[error("intrinsic dimension {0} too small (need n >= 2)")]
    DimensionTooSmall(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("focal point: tangential gradient norm {norm:e} below threshold")]
    FocalPoint { norm: f64 },

    #[error("retraction did not converge after {iterations} Newton steps (residual {residual:e})")]
    RetractionDiverged { iterations: usize, residual: f64 },

    #[error("finite-difference step {0:e} outside [1e-4, 1e-2]")]
    StepOutOfRange(f64),

    #[error("surface has non-constant mean curvature; the constant-H Laplacian formula does not apply")]
    NonConstantMeanCurvature,

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("unsupported isoparametric g = {0} (must be one of 1, 2, 3, 4, 6)")]
    UnsupportedG(usize),

    #[error("quadrature degree {0} out of range [1, {max}]", max = crate::quadrature::MAX_DEGREE)]
    DegreeOverflow(usize),

    #[error("integration method {method} is not available for {surface}")]
    MethodMismatch { method: String, surface: String },

    #[error("degenerate profile coefficient {0:e}")]
    DegenerateCoefficient(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}
