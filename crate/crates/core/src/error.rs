use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix is not unitary (defect {defect:.3e} > {tol:.0e})")]
    NotUnitary { defect: f64, tol: f64 },
    #[error("parity: {0}")]
    Parity(String),
    #[error("graph generation failed: {0}")]
    Generation(String),
    #[error("edge {edge} already carries a scatterer")]
    DuplicateScatterer { edge: usize },
    #[error("assembly: {0}")]
    Assembly(String),
    #[error("expected {expected} scatterer(s), found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("vertex {vertex} has degree {degree}, expected {expected}")]
    WrongDegree { vertex: usize, degree: usize, expected: usize },
    #[error("eigen-solver failure at k = {k}: {msg}")]
    EigenSolver { k: f64, msg: String },
    #[error(
        "incomplete scan in [{k_min}, {k_max}]: found {found} roots, winding count {expected}; retry with a smaller step"
    )]
    IncompleteScan { k_min: f64, k_max: f64, found: usize, expected: usize },
    #[error("classification: {0}")]
    Classification(String),
    #[error("degenerate limit: {0}")]
    DegenerateLimit(String),
    #[error("strength ν = {0} is not positive: use the swap rule p_in(ν) = p_ex(−ν)")]
    SwapRule(f64),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("empty input")]
    EmptyInput,
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::EigenSolver { .. } | Error::Linalg(_) | Error::NotUnitary { .. }
        )
    }

    /// True for self-check failures such as missed roots.
    pub fn is_audit(&self) -> bool {
        matches!(self, Error::IncompleteScan { .. } | Error::Classification(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
