use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("atom {value} has non-positive probability {prob}")]
    NonPositiveProbability { value: f64, prob: f64 },

    #[error("atom value {0} appears more than once")]
    DuplicateAtom(f64),

    #[error("a discrete prior needs at least 2 atoms, got {0}")]
    TooFewAtoms(usize),

    #[error("atom probabilities sum to {sum}, which is not within 1e-9 of 1")]
    NotNormalized { sum: f64 },

    #[error("variance must be positive and finite, got {0}")]
    NonPositiveVariance(f64),

    #[error("{name} must be finite, got {value}")]
    NonFiniteParameter { name: &'static str, value: f64 },

    #[error("{0} is not an atom of the prior")]
    AtomNotFound(f64),

    #[error("operation requires beta > 0")]
    BetaZero,

    #[error("beta must be finite and non-negative, got {0}")]
    InvalidBeta(f64),

    #[error("integrand is not finite at {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("value is not finite at {at}")]
    NonFiniteValue { at: f64 },

    #[error("adaptive quadrature on [{lo}, {hi}] did not reach tolerance")]
    ToleranceNotReached { lo: f64, hi: f64 },

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("the prior is not equiprobable; the classical entropy integral does not apply")]
    NonEquiprobablePrior,

    #[error("invalid quadrature setting {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
}
