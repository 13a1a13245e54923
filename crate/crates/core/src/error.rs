use thiserror::Error;

/// Errors produced by the solvers and kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Matrix/vector shapes are inconsistent.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An input contained NaN or infinity.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// A structural invariant of an input was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The NNLS active-set iteration did not terminate within its cap,
    /// which usually signals a badly conditioned system.
    #[error("NNLS iteration cap of {cap} exceeded")]
    IterationCap { cap: usize },

    /// The exact solver would have to enumerate more sign vectors than the
    /// configured cap allows. Use the branch-and-bound solver instead.
    #[error("enumeration of 2^{groups} sign vectors exceeds the cap 2^{cap}; use the branch-and-bound solver")]
    EnumerationCap { groups: usize, cap: usize },

    /// Every enumerated subproblem failed; no candidate solution exists.
    #[error("all {0} subproblems failed")]
    AllSubproblemsFailed(usize),
}
