use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MorreyError {
    #[error("invalid exponents: need 1 <= p < q < inf, got p = {p}, q = {q}")]
    InvalidExponents { p: f64, q: f64 },

    #[error("invalid dimension {0}: need d >= 1")]
    InvalidDimension(usize),

    #[error("invalid annulus ({lo}, {hi}): need 0 <= r_lo < r_hi")]
    InvalidAnnulus { lo: f64, hi: f64 },

    #[error("invalid ball: center distance {center_dist}, radius {radius}")]
    InvalidBall { center_dist: f64, radius: f64 },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested annuli are so thin that `eps^(alpha * K)` underflows.
    #[error("underflow: {0}")]
    Underflow(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The search objective was still increasing at the edge of the search window.
    #[error("supremum not captured in search window: {0}")]
    Divergent(String),
}

pub type Result<T> = std::result::Result<T, MorreyError>;
