use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("energy integral diverges: both final slopes are nonzero")]
    Divergent,

    #[error("function is not convex")]
    NotConvex,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid piecewise-linear data: {0}")]
    InvalidPlf(String),

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("invalid curve model: {0}")]
    InvalidCurve(String),

    #[error("operation requires a genus-0 model (genus is {0})")]
    UnsupportedGenus(u32),

    #[error("metrised divisors live on different curve models")]
    CurveMismatch,

    #[error("invalid edge at point `{point}`: {reason}")]
    Construction { point: String, reason: String },

    #[error("divisor has degree {0}, expected 0")]
    NotPrincipal(String),

    #[error("no feasible section: Γ(D) is empty")]
    NoFeasibleSection,

    #[error("section is not in Γ(D) at point `{0}`")]
    InfeasibleSection(String),

    #[error("empty list")]
    EmptyList,

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("divisor is not integral at point `{0}`")]
    NotIntegral(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for failures that come from the mathematics of a valid input
    /// (empty section spaces, violated hypotheses) rather than malformed data.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::NoFeasibleSection
                | Error::Precondition(_)
                | Error::NotPrincipal(_)
                | Error::InfeasibleSection(_)
                | Error::NotConvex
                | Error::Divergent
                | Error::UnsupportedGenus(_)
                | Error::NotIntegral(_)
                | Error::OutOfRange(_)
        )
    }
}
