//! Error type shared by all solver stages.

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A parameter violated its domain (sign, range, finiteness).
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// Elimination hit a pivot below the relative threshold. For physical
    /// parameters this signals an exact pole of the determinant; perturbing
    /// `p` or `n_max` usually resolves it.
    #[error("tridiagonal system is numerically singular at row {index} (|pivot| = {magnitude:.3e})")]
    SingularMatrix { index: usize, magnitude: f64 },

    /// A continued-fraction denominator vanished while sweeping the tails.
    #[error("continued-fraction breakdown at sideband n = {0}")]
    ContinuedFractionBreakdown(i32),

    /// Doubling `n_max` hit the channel cap before the observable settled.
    #[error(
        "truncation did not converge: n_max = {reached} reaches the {cap}-channel cap \
         (last |B0|^2 change {last_change:.3e})"
    )]
    TruncationNotConverged {
        reached: usize,
        cap: usize,
        last_change: f64,
    },

    /// An analytic predictor left the first Floquet band.
    #[error("prediction outside the first Floquet band: {0}")]
    OutOfBand(String),

    /// The driven-only zero-transmission condition has no root.
    #[error("no zero-transmission root: g1^2 = {g1_squared:.6e} exceeds 16*sqrt(2)*omega = {limit:.6e}")]
    NoZtpRoot { g1_squared: f64, limit: f64 },

    /// The complex root iteration ran out of iterations.
    #[error("pole search did not converge within {iterations} iterations (last step {last_step:.3e})")]
    PoleNotConverged { iterations: usize, last_step: f64 },

    /// A channel momentum could not be continued unambiguously.
    #[error("branch continuation became ambiguous for channel n = {0}")]
    BranchJump(i32),

    /// Node doubling stopped changing the overlap by less than the target.
    #[error(
        "quadrature did not converge: {nodes} nodes leave a change of {achieved:.3e} \
         (target {target:.3e})"
    )]
    QuadratureNotConverged {
        nodes: usize,
        achieved: f64,
        target: f64,
    },

    /// The decay-fit window contains too few usable samples.
    #[error("degenerate fit window: {0}")]
    DegenerateFitWindow(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_) | Error::OutOfBand(_) | Error::NoZtpRoot { .. }
        )
    }
}
