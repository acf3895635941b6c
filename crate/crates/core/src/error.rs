use thiserror::Error;

use crate::geodesic::Fate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension n = {0} is not supported (n must be at least 2)")]
    InvalidDimension(u64),

    #[error("{what} = {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid integrator configuration: {0}")]
    Config(String),

    #[error("step size underflow at s = {s} (dtau = {step:e}); dynamics are near-singular")]
    StepSizeUnderflow { s: f64, step: f64 },

    #[error("step budget of {0} exhausted")]
    StepBudget(usize),

    #[error("no sign change: {0}")]
    NoBracket(String),

    #[error("bisection stalled: {0}")]
    BisectionStalled(String),

    #[error("trajectory did not return to the section x = 0 ({0})")]
    NoReturn(Fate),

    #[error("path has {got} samples, need at least {need}")]
    TooFewSamples { got: usize, need: usize },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }
}
