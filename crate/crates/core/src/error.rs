use thiserror::Error;

use crate::smatrix::Lead;

/// Errors produced while building gates or evaluating transport quantities.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid gate parameter: kappa = {0} is not finite")]
    InvalidParameter(f64),

    #[error("scattering matrix entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("target state must have unit norm, got |target|^2 = {0}")]
    InvalidTarget(f64),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid bias configuration: {0}")]
    InvalidBias(String),

    #[error("noise prefactor is undefined at zero bias and zero temperature")]
    UndefinedLimit,

    #[error("invalid range: [{min}, {max}] with {points} points")]
    InvalidRange { min: f64, max: f64, points: usize },

    #[error("invalid partition trial: {0}")]
    InvalidTrial(String),

    #[error("unknown lead label {0:?}")]
    UnknownLead(String),
}

impl Error {
    pub(crate) fn same_lead(what: &str, lead: Lead) -> Self {
        Error::InvalidMeasurement(format!("{what} lead {lead} coincides with the input lead"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
