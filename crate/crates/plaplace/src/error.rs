//! Error types shared across the solver and analysis pipelines.

use thiserror::Error;

/// Failures raised by integration, shooting, and identity evaluation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The adaptive step controller underflowed the minimum step size,
    /// usually a sign of blow-up or an unresolvable kink.
    #[error("step size underflow at r = {r:.6e} (h = {h:.3e})")]
    StepFailure { r: f64, h: f64 },

    /// The state left the floating-point range.
    #[error("non-finite state at r = {r:.6e}")]
    NonFinite { r: f64 },

    /// The shooting map has constant sign on the supplied bracket.
    #[error("no sign change of u(radius; alpha) on [{lo:.6e}, {hi:.6e}]")]
    NoBracket { lo: f64, hi: f64 },

    /// No sign change of u was found before `r_max`.
    #[error("no zero of u before r = {r_max:.6e}")]
    NoZero { r_max: f64 },

    /// Shooting iteration stalled before reaching the boundary tolerance.
    #[error("shooting stalled: |u(radius)| = {defect:.3e} > {tol:.3e}")]
    ShootingStall { defect: f64, tol: f64 },

    /// Quadrature grid is not uniform or has an even sample count.
    #[error("bad quadrature grid: {0}")]
    BadGrid(String),

    /// A solution was evaluated on a different domain than required.
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    /// An operation's stated precondition does not hold.
    #[error("precondition violation: {0}")]
    PreconditionViolation(String),

    /// phi_p'(u') is singular or degenerate too close to a critical point.
    #[error("derivative singularity near r = {r:.6e}: |u'| = {uprime_abs:.3e}")]
    DerivativeSingularity { r: f64, uprime_abs: f64 },

    /// Malformed input file or parameter string.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepFailure { .. }
                | Error::NonFinite { .. }
                | Error::NoBracket { .. }
                | Error::NoZero { .. }
                | Error::ShootingStall { .. }
                | Error::DerivativeSingularity { .. }
        )
    }
}
