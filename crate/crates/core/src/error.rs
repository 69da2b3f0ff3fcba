use thiserror::Error;

/// Errors raised while building models or running the twisted calculus.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree {degree} out of range for frame dimension {frame_dim}")]
    DegreeOutOfRange { degree: usize, frame_dim: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("frame dimension {0} is not supported (expected 1..=12)")]
    InvalidFrameDimension(usize),

    #[error("cutoff {cutoff} is below the kernel-support radius {radius:.4}")]
    CutoffInsufficient { cutoff: usize, radius: f64 },

    #[error("twist is not closed (residual {residual:.3e})")]
    TwistNotClosed { residual: f64 },

    #[error("twist is not parallel for the Bott connection (|nabla theta| = {residual:.3e})")]
    NotParallel { residual: f64 },

    #[error("malformed simplex {simplex:?}: {reason}")]
    MalformedSimplex { simplex: Vec<usize>, reason: String },

    #[error("complex has no simplices")]
    EmptyComplex,

    #[error("cocycle is not closed on triangle {triangle:?} (defect {defect})")]
    CocycleNotClosed { triangle: [usize; 3], defect: String },

    #[error("no cocycle value for edge ({0}, {1})")]
    MissingEdge(usize, usize),

    #[error("edge ({0}, {1}) is not in the complex")]
    UnknownEdge(usize, usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("checksum mismatch for bundled file {0}")]
    Checksum(String),

    #[error("determinant is {0}, expected 1")]
    DeterminantNotOne(i64),

    #[error("trace {0} does not exceed 2")]
    TraceTooSmall(i64),

    #[error("rates are not unimodular (transverse sum + leaf rate = {0:.3e})")]
    NonUnimodular(f64),

    #[error("mean curvature mismatch: adjoint gives {adjoint}, leaf rate is {formula}")]
    ConventionMismatch { adjoint: f64, formula: f64 },

    #[error("Jacobi identity fails for ({0}, {1}, {2})")]
    JacobiViolation(usize, usize, usize),

    #[error("structure constants are not antisymmetric at ({0}, {1}, {2})")]
    NotAntisymmetric(usize, usize, usize),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
