use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at x = {x}")]
    StepUnderflow { x: f64 },
    #[error("right-hand side not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("step budget exhausted at x = {x}")]
    MaxSteps { x: f64 },
}

impl OdeError {
    pub fn position(&self) -> f64 {
        match *self {
            OdeError::StepUnderflow { x } | OdeError::NonFinite { x } | OdeError::MaxSteps { x } => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid cone (m = {m}, n = {n}): both factors must be at least 2")]
    InvalidCone { m: u32, n: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("regime {regime} does not match m + n = {sum}")]
    RegimeMismatch { regime: &'static str, sum: u32 },
    #[error("profile integration failed; last valid arc length s = {last_s}: {source}")]
    Integration { last_s: f64, source: OdeError },
    #[error("grid does not cover the requested range [{lo}, {hi}]")]
    GridCoverage { lo: f64, hi: f64 },
    #[error("dilation field changes sign at t = {t} inside the left interval; move t0 below it")]
    Breakpoint { t: f64 },
    #[error("right-hand side is not integrable against the left fundamental pair")]
    NonIntegrable,
    #[error("Jacobi residual {residual:.3e} exceeds target {target:.3e}")]
    ResidualTarget { residual: f64, target: f64 },
    #[error("insufficient samples for fit: need {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },
    #[error("all samples are zero")]
    AllZero,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
