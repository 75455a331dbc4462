use thiserror::Error;

/// Broad category of a failure, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Inputs violate a documented precondition or schema.
    Validation,
    /// Inputs were acceptable but the computation hit a numeric degeneracy.
    Numeric,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("points are not collinear (relative defect {defect:.3e})")]
    Collinearity { defect: f64 },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("numeric degeneracy: {0}")]
    NumericDegeneracy(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies outside the domain of definition (denominator {denominator:.3e})")]
    OutsideHalfSpace { denominator: f64 },

    #[error("map is not invertible: {0}")]
    NotInvertible(String),

    #[error("point is outside the open convex domain")]
    OutsideDomain,

    #[error("points coincide, no unique line through them")]
    NoUniqueLine,

    #[error("geodesic parameter {t} leaves the domain interior")]
    BoundaryOverflow { t: f64 },

    #[error("strict convexity violated on chord {a:?} -> {b:?} (margin {margin:.3e})")]
    StrictnessViolation { a: Vec<f64>, b: Vec<f64>, margin: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sample contradicts line preservation in group {group}: images are not collinear")]
    GeodesicViolation { group: usize },

    #[error("fitted map is not a disk isometry: {0}")]
    NotDiskIsometry(String),

    #[error("element is not hyperbolic: {0}")]
    NotHyperbolic(String),

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("reduction did not converge within {cutoff} steps")]
    NonConvergence { cutoff: usize },

    #[error("geodesics share the same axis")]
    SameAxis,

    #[error("tangency: crossing parameters coincide within tolerance on geodesic {geodesic}")]
    Tangency { geodesic: usize },

    #[error("tracing failed: {0}")]
    Tracing(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl GeometryError {
    pub fn class(&self) -> ErrorClass {
        use GeometryError::*;
        match self {
            NumericDegeneracy(_) | DegenerateConfiguration(_) | NotInvertible(_) | BoundaryOverflow { .. } | NonConvergence { .. }
            | Tracing(_) | Consistency(_) | Tangency { .. } => ErrorClass::Numeric,
            _ => ErrorClass::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, GeometryError>;
