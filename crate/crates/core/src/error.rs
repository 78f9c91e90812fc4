use alloc::string::String;

/// Errors raised by the algebra, geometry and solver layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("tensor of order {order} evaluated on {found} points")]
    Arity { order: usize, found: usize },
    #[error("cannot refine a singleton simplex")]
    CannotRefine,
    #[error("point is outside the affine hull (residual {residual:e})")]
    OutsideAffineHull { residual: f64 },
    #[error("point is infeasible: generator {index} evaluates to {value:e}")]
    InfeasiblePoint { index: usize, value: f64 },
    #[error("nonnegative least squares did not converge after {iterations} iterations")]
    NnlsNoConvergence { iterations: usize },
    #[error("projection onto the constraint set did not converge (violation {violation:e})")]
    ProjectionNoConvergence { violation: f64 },
    #[error("empty partition: nothing to assemble")]
    EmptyPartition,
    #[error("degree schedule infeasible: generator {index} has degree {generator_degree} > {budget}")]
    DegreeSchedule { index: usize, generator_degree: u32, budget: u32 },
    #[error("unsound certificate: substitution residual {residual:e} exceeds {tolerance:e}")]
    UnsoundCertificate { residual: f64, tolerance: f64 },
    #[error("singular linear system")]
    Singular,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
