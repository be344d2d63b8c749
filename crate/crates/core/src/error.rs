use thiserror::Error;

/// Errors across matrix handling, solvers, and construction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is empty or all-zero")]
    EmptyMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("columns are not orthonormal (max deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),
    #[error("epsilon must lie in (0, 1], got {0}")]
    BadEpsilon(f64),
    #[error("oracle produced squared residual {0:.3e} below -1e-9; Gram data is inconsistent")]
    OracleInconsistency(f64),
    #[error("line-search segment is degenerate (iterate coincides with the selected vertex)")]
    DegenerateStep,
    #[error("numerical breakdown: relative pivot {pivot:.3e} below threshold")]
    NumericalBreakdown { pivot: f64 },
    #[error("k = {k} must be smaller than the effective rank {rank}")]
    KTooLarge { k: usize, rank: usize },
    #[error("lifted row {row} has zero norm and cannot be weighted")]
    ZeroNormRow { row: usize },
    #[error("query subspace is orthogonal to all data (denominator below 1e-30)")]
    ZeroDenominator,
    #[error("stream contains no rows")]
    EmptyStream,
    #[error("input contains no points")]
    EmptyInput,
    #[error("svd did not converge after {sweeps} sweeps")]
    SvdNotConverged { sweeps: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
