use thiserror::Error;

use crate::families::TriangleStatus;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("{operation} requires a two-branch (attractive-repulsive) shape")]
    MonotoneShape { operation: &'static str },

    #[error("{operation}: no bracket found for level {level:e} after {doublings} doublings")]
    BracketFailure {
        operation: &'static str,
        level: f64,
        doublings: usize,
    },

    #[error("{operation}: level {level:e} has no root on the requested branch")]
    NoRoot { operation: &'static str, level: f64 },

    #[error("{operation}: triangle ({r12}, {r13}, {r23}) is {status:?}")]
    Triangle {
        operation: &'static str,
        status: TriangleStatus,
        r12: f64,
        r13: f64,
        r23: f64,
    },

    #[error("bodies {i} and {j} coincide (distance {distance:e})")]
    CoincidentBodies { i: usize, j: usize, distance: f64 },

    #[error("step size underflow at t = {t:e} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t:e}")]
    StepBudget { t: f64, max_steps: usize },

    #[error("trajectory ends at t = {t_end:e}, before the period {period:e}")]
    TrajectoryTooShort { t_end: f64, period: f64 },

    #[error("{operation}: {reason}")]
    Numerical {
        operation: &'static str,
        reason: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
