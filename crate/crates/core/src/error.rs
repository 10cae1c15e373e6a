use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// Variants are grouped so that callers (in particular the CLI) can tell
/// malformed input apart from a failed numerical check.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree exceeds dimension: {degree} > {dim}")]
    DegreeExceedsDimension { degree: usize, dim: usize },
    #[error("dimension cap exceeded: n = {0} (supported 2..=8)")]
    DimensionCap(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("metric is not symmetric positive definite")]
    MetricNotSpd,
    #[error("trials must be positive")]
    TrialsMustBePositive,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported face arity {arity} at line {line}")]
    UnsupportedFaceArity { arity: usize, line: usize },
    #[error("mesh not orientable (edge {0}-{1})")]
    NotOrientable(usize, usize),
    #[error("non-manifold edge {0}-{1} shared by {2} triangles")]
    NonManifoldEdge(usize, usize, usize),
    #[error("degenerate element {0}")]
    DegenerateElement(usize),
    #[error("size mismatch: {what} has {got} entries, expected {expected}")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mass matrix not SPD (degree {0})")]
    MassNotSpd(usize),
    #[error("rank ambiguous; refine mesh or tolerance (gap ratio {gap:.3e})")]
    RankAmbiguous { gap: f64 },
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("input is not a harmonic field (residual {0:.3e})")]
    NotHarmonic(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed user input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::MassNotSpd(_)
                | Error::RankAmbiguous { .. }
                | Error::Solver(_)
                | Error::NotHarmonic(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
