use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be {requirement}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
    },
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("time grid must start at 0 and be strictly increasing")]
    InvalidTimeGrid,
    #[error("non-finite value encountered at t = {time}")]
    NonFinite { time: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(&'static str),
    #[error("mixing angle undefined for epsilon = delta = 0")]
    UndefinedMixingAngle,
    #[error("effective temperature undefined: excitation rate {gamma_up} with zero relaxation")]
    UndefinedTemperature { gamma_up: f64 },
    #[error("at most {max} consecutive measurements are supported, got {requested}")]
    BranchLimit { requested: usize, max: usize },
}
