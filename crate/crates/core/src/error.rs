//! Crate-wide error type.

/// Errors reported by model construction, analysis and integration.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A circuit parameter violates its bound; the message names the field.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A matrix inversion hit a (numerically) zero determinant.
    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    DomainError(String),

    /// The integrator hit its step budget before reaching the end time.
    #[error("step limit exceeded: {steps} steps used, stalled at t = {t:e} s")]
    StepLimitExceeded { steps: usize, t: f64 },

    /// Step-size control drove the step below the resolvable floor.
    #[error("step underflow at t = {t:e} s (h = {h:e} s)")]
    StepUnderflow { t: f64, h: f64 },

    /// Two redundant computation routes disagree; signals a numerical fault.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
