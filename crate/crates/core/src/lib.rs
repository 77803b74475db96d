//! Mutual information of the additive Gaussian-noise channel computed from
//! its statistical-mechanics description.
//!
//! The posterior P(X | Y = y) of the channel Y = X + N(0, 1/β) is a
//! Boltzmann distribution at inverse temperature β (the snr). From the
//! internal energy U(y; β) one obtains the mutual information by an entropy
//! integral over β ([`thermo`]), which is cross-checked against the I-MMSE
//! integral ([`estimation`]) and against closed forms and Monte-Carlo
//! oracles ([`reference`]).
//!
//! ```
//! use thermomi::{InputDistribution, QuadratureConfig};
//! use thermomi::thermo::mi_thermo_generalized;
//!
//! let prior = InputDistribution::standard_gaussian();
//! let cfg = QuadratureConfig::default();
//! let mi = mi_thermo_generalized(&prior, 1.0, &cfg).unwrap();
//! assert!((mi.value_nats - 0.5 * 2f64.ln()).abs() < 1e-4);
//! ```

pub mod boltzmann;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod exec;
pub mod quadrature;
pub mod reference;
pub mod thermo;

pub use boltzmann::{ChannelPoint, EnergyModel, Posterior, PosteriorLaw};
pub use distributions::{Atom, InputDistribution, PriorSpec, PriorView};
pub use error::{Error, Result};
pub use estimation::GsvCheck;
pub use exec::Execution;
pub use quadrature::{QuadratureConfig, YRule};
pub use reference::{McEstimate, OracleConfig};
pub use thermo::{MIResult, Route};
