use thiserror::Error;

/// Errors surfaced by path sampling, norm evaluation, integration and the
/// fixed-point solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("time {t} is not aligned with the grid (t0={t0}, h={h})")]
    Misaligned { t: f64, t0: f64, h: f64 },

    #[error("time {t} lies outside the grid [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("grids are incompatible: {message}")]
    GridMismatch { message: String },

    #[error(
        "covariance factorization failed at pivot {pivot} (grid steps n={n}, hurst={hurst}): \
         matrix is numerically non positive definite"
    )]
    CovarianceFactorization { n: usize, hurst: f64, pivot: usize },

    #[error("grid with {steps} steps exceeds the exact Cholesky sampling cap of {max} steps")]
    CovarianceTooLarge { steps: usize, max: usize },

    #[error("pair scan with {nodes} nodes exceeds the exact-evaluation cap of {max}; use a stride policy")]
    PairBudgetExceeded { nodes: usize, max: usize },

    #[error("concatenation endpoint mismatch: left ends at {left:?}, right starts at {right:?}")]
    EndpointMismatch { left: Vec<f64>, right: Vec<f64> },

    #[error("iterate does not match the prescribed history segment at node {node}")]
    HistoryMismatch { node: usize },

    #[error(
        "fixed-point iteration did not converge: residual {residual:.3e} after {iterations} \
         iterations and {escalations} weight escalations (ratio history {ratios:?})"
    )]
    NonConvergence {
        residual: f64,
        iterations: usize,
        escalations: usize,
        ratios: Vec<f64>,
    },

    #[error("integration methods disagree beyond tolerance: formula={formula:.6e}, sums={sums:.6e}, tolerance={tolerance:.3e}")]
    MethodDisagreement { formula: f64, sums: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter { name, message: message.into() }
    }
}
