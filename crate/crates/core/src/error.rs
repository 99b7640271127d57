use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("critical modulus k = 1: K diverges")]
    CriticalModulus,
    #[error("pole of sn near u = {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("branch miss for dn^-1({w_re} + {w_im}i): requested {requested}, candidates {candidates}")]
    BranchMiss {
        w_re: f64,
        w_im: f64,
        requested: String,
        candidates: String,
    },
    #[error("dual pole at a = -1")]
    DualPole,
    #[error("split pole at a = 0")]
    SplitPole,
    #[error("eta solve failure: residual {residual:e}")]
    EtaSolve { residual: f64 },
    #[error("eigen-solver did not converge for M = {m}")]
    EigenNoConvergence { m: usize },
    #[error("joint diagonalization failure: residual {residual:e}")]
    JointDiagonalization { residual: f64 },
    #[error("branch inconsistency at mu = {mu}: quantization residual {residual:e}")]
    BranchInconsistency { mu: usize, residual: f64 },
    #[error("phase leak: max |Im h_n|/|h_n| = {ratio:e}")]
    PhaseLeak { ratio: f64 },
    #[error("sign anomaly in block-transfer determinant: {0}")]
    SignAnomaly(String),
    #[error("contour not converged: last relative change {change:e} at {samples} samples")]
    ContourNotConverged { change: f64, samples: usize },
    #[error("route infeasible: {0}")]
    Infeasible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
