use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("metric is singular")]
    SingularMetric,
    #[error("metric is not positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid dimension parameter {0}: must be at least 1")]
    InvalidDimension(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("contraction slots must be distinct")]
    RepeatedSlot,
    #[error("point lies outside the chart domain")]
    OutsideChart,
    #[error("structural and residual Einstein verdicts disagree (structural: {structural}, residual: {residual})")]
    VerdictDisagreement { structural: bool, residual: bool },
}
