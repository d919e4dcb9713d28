use thiserror::Error;

/// Errors raised by the channel engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A lattice sum would need more points per axis than the configured cap.
    #[error(
        "theta lattice sum needs {needed} points along axis {axis} (cap {cap}); \
         evaluate the flipped representation instead"
    )]
    Convergence { axis: usize, needed: usize, cap: usize },

    /// The Fock truncation is too small for the requested state or operator.
    #[error("Fock cutoff {cutoff} too small: {detail}")]
    Cutoff { cutoff: usize, detail: String },

    /// β = γ = 0 describes ideal, unnormalizable GKP states.
    #[error("degenerate parameters: beta = gamma = 0 has no finite-energy channel")]
    DegenerateParameters,

    /// γ = 1 must go through the replacement-channel path.
    #[error("complete loss (gamma = 1) has no Kraus form here; use the replacement channel")]
    CompleteLoss,

    /// A trace-one process matrix was required.
    #[error("process matrix is not trace-normalized (trace = {0}); normalize first")]
    Unnormalized(f64),

    /// The channel annihilated the input state.
    #[error("channel output has zero trace")]
    DegenerateChannel,

    /// An internal consistency check failed.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
