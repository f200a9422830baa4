//! Error taxonomy shared by every module.
//!
//! The split matters to callers: `Parse`/`Data`/`Io` indicate bad input,
//! while `DegenerateExcess`, `DegenerateChain`, `MeanUndefined` and
//! `NoFeasibleGridPoint` indicate a numerically infeasible computation on
//! valid input. The CLI maps the two groups to different exit codes.

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter {name}={value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("value {value} outside support ({support})")]
    OutOfSupport { value: f64, support: &'static str },

    #[error("probability {p} outside the open interval (0, 1)")]
    InvalidProbability { p: f64 },

    /// Fewer than two strict exceedances above the chosen threshold.
    #[error("insufficient tail: {n_exceed} strict exceedance(s) above u={u}, need at least 2")]
    InsufficientTail { n_exceed: usize, u: f64 },

    /// Relative excesses x/u are not a meaningful tail model for u <= 0.
    #[error("nonpositive threshold u={u}: relative excesses undefined")]
    NonpositiveThreshold { u: f64 },

    /// `1 - y^(-2 gamma)` left the representable range for this sample:
    /// underflow to 0 near gamma -> 0, or rounding to 1 for every excess as
    /// gamma -> infinity (which zeroes the Gamma rate of the alpha draw).
    #[error("degenerate excess at gamma={gamma}: {detail}")]
    DegenerateExcess { gamma: f64, detail: &'static str },

    /// A Gamma variate generator produced no positive finite draw; the chain
    /// has escaped the representable parameter range.
    #[error("degenerate chain: no positive finite Gamma(shape={shape}, rate={rate}) draw")]
    DegenerateChain { shape: f64, rate: f64 },

    #[error("mean undefined for shape={shape}: requires shape > 1")]
    MeanUndefined { shape: f64 },

    #[error("no feasible grid point: every (gamma, rank) candidate failed")]
    NoFeasibleGridPoint,

    /// More than 1% of Monte Carlo repetitions failed; the aggregate would be
    /// misleading, so the whole run is rejected.
    #[error("too many failed repetitions: {failed} of {total}")]
    TooManyFailures { failed: usize, total: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by malformed, missing, or unusable input
    /// rather than by numerical degeneracy during a valid computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::Data(_)
                | Error::Io(_)
                | Error::InvalidParameter { .. }
                | Error::InvalidProbability { .. }
                | Error::OutOfSupport { .. }
                | Error::InsufficientTail { .. }
                | Error::NonpositiveThreshold { .. }
        )
    }
}
