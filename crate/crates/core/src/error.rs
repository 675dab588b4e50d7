use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter violated its domain; `name` identifies the offending field
    /// or argument.
    #[error("invalid argument `{name}`: {reason} (got {value})")]
    InvalidArgument {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Path-loss gain is singular at zero distance.
    #[error("path-loss gain is singular at zero distance")]
    ZeroDistance,

    /// Division guard for SINR with no interference and nonpositive noise.
    #[error("SINR denominator is not positive (interference {interference}, noise {noise})")]
    DivisionGuard { interference: f64, noise: f64 },

    /// An ordered-distance argument was not strictly ascending.
    #[error("distances must be strictly ascending and positive")]
    NotAscending,

    /// A deployment held fewer stations than the connectivity order needs.
    #[error("deployment has {available} stations but connectivity order {needed} was requested")]
    InsufficientDeployment { available: usize, needed: usize },

    /// Quadrature refinement stalled before reaching the requested tolerance.
    /// Carries the final two estimates so the caller can judge the gap.
    #[error(
        "integral did not converge to rel_tol {rel_tol:e} after {refinements} refinements \
         (last two estimates {previous} -> {last})"
    )]
    Accuracy {
        rel_tol: f64,
        refinements: usize,
        previous: f64,
        last: f64,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidArgument {
            name,
            value,
            reason,
        }
    }
}
