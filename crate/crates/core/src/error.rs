use thiserror::Error;

/// Unified error type for the crate.
///
/// Numeric payloads are reported as `f64` regardless of the working scalar.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("matrix not symmetric: max |M - M^T| entry is {asymmetry:e}")]
    NotSymmetric { asymmetry: f64 },

    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("ambiguous spectral classification: eigenvalue {eigenvalue} lies within {tol:e} of a set boundary")]
    AmbiguousClassification { eigenvalue: f64, tol: f64 },

    #[error("degenerate partition: spectral set selects {selected} of {total} eigenvalues")]
    DegeneratePartition { selected: usize, total: usize },

    #[error("spectra too close: separation {delta:e} is below threshold {threshold:e}")]
    NearSingular { delta: f64, threshold: f64 },

    #[error("stale solution: residual {residual:e} exceeds tolerance {tolerance:e}")]
    StaleSolution { residual: f64, tolerance: f64 },

    #[error("subspaces not in the acute-angle case: maximal angle {theta}")]
    NotAcute { theta: f64 },

    #[error("undefined angle: {0}")]
    UndefinedAngle(String),

    #[error("perturbation too large: norm {vnorm} not below {limit}")]
    PerturbationTooLarge { vnorm: f64, limit: f64 },

    #[error("model too large: dimension {dim} exceeds cap {cap}")]
    SizeExceeded { dim: usize, cap: usize },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
