//! Channel-input priors.
//!
//! Two kinds are supported: a finite list of atoms and a scalar Gaussian.
//! Both have a finite second moment. Everything is in nats.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Drift from 1 that `discrete` silently corrects.
pub const RENORMALIZE_LIMIT: f64 = 1e-9;

/// Below this drift the probabilities are left untouched, so that
/// renormalizing an already-normalized list is a no-op.
const EXACT_SUM_SLACK: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// Borrowed view used to branch on the prior kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorView<'a> {
    Discrete(&'a [Atom]),
    Gaussian { mean: f64, variance: f64 },
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Discrete {
        atoms: Vec<Atom>,
        equiprobable: bool,
        constant_square: bool,
    },
    Gaussian {
        mean: f64,
        variance: f64,
    },
}

/// The channel-input law P(X). Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PriorSpec", into = "PriorSpec")]
pub struct InputDistribution {
    repr: Repr,
}

/// Wire form of a prior, as it appears in JSON configs and reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PriorSpec {
    Discrete { atoms: Vec<(f64, f64)> },
    Gaussian { mean: f64, variance: f64 },
}

impl TryFrom<PriorSpec> for InputDistribution {
    type Error = Error;

    fn try_from(spec: PriorSpec) -> Result<Self> {
        match spec {
            PriorSpec::Discrete { atoms } => InputDistribution::discrete(&atoms),
            PriorSpec::Gaussian { mean, variance } => InputDistribution::gaussian(mean, variance),
        }
    }
}

impl From<InputDistribution> for PriorSpec {
    fn from(dist: InputDistribution) -> Self {
        match dist.repr {
            Repr::Discrete { atoms, .. } => PriorSpec::Discrete {
                atoms: atoms.iter().map(|a| (a.value, a.prob)).collect(),
            },
            Repr::Gaussian { mean, variance } => PriorSpec::Gaussian { mean, variance },
        }
    }
}

impl InputDistribution {
    /// Builds a finite prior from `(value, probability)` pairs.
    ///
    /// Probabilities whose sum is off by less than [`RENORMALIZE_LIMIT`] are
    /// rescaled; a larger drift is rejected.
    pub fn discrete(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.len() < 2 {
            return Err(Error::TooFewAtoms(atoms.len()));
        }
        for (i, &(value, prob)) in atoms.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteParameter { name: "atom value", value });
            }
            if !(prob > 0.0 && prob.is_finite()) {
                return Err(Error::NonPositiveProbability { value, prob });
            }
            if atoms[..i].iter().any(|&(v, _)| v == value) {
                return Err(Error::DuplicateAtom(value));
            }
        }

        let sum: f64 = atoms.iter().map(|&(_, p)| p).sum();
        if (sum - 1.0).abs() >= RENORMALIZE_LIMIT {
            return Err(Error::NotNormalized { sum });
        }
        let scale = if (sum - 1.0).abs() > EXACT_SUM_SLACK { sum } else { 1.0 };
        let atoms: Vec<Atom> = atoms
            .iter()
            .map(|&(value, prob)| Atom { value, prob: prob / scale })
            .collect();

        let p0 = atoms[0].prob;
        let equiprobable = atoms.iter().all(|a| (a.prob - p0).abs() <= 1e-12 * p0);
        let s0 = atoms[0].value * atoms[0].value;
        let constant_square = atoms
            .iter()
            .all(|a| (a.value * a.value - s0).abs() <= 1e-12 * s0.max(1.0));

        Ok(Self {
            repr: Repr::Discrete { atoms, equiprobable, constant_square },
        })
    }

    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::NonFiniteParameter { name: "mean", value: mean });
        }
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::NonPositiveVariance(variance));
        }
        Ok(Self { repr: Repr::Gaussian { mean, variance } })
    }

    /// Equiprobable ±1.
    pub fn bernoulli_half() -> Self {
        Self::discrete(&[(-1.0, 0.5), (1.0, 0.5)]).expect("valid prior")
    }

    pub fn standard_gaussian() -> Self {
        Self::gaussian(0.0, 1.0).expect("valid prior")
    }

    pub fn view(&self) -> PriorView<'_> {
        match &self.repr {
            Repr::Discrete { atoms, .. } => PriorView::Discrete(atoms),
            Repr::Gaussian { mean, variance } => PriorView::Gaussian {
                mean: *mean,
                variance: *variance,
            },
        }
    }

    pub fn atoms(&self) -> Option<&[Atom]> {
        match &self.repr {
            Repr::Discrete { atoms, .. } => Some(atoms),
            Repr::Gaussian { .. } => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.repr, Repr::Discrete { .. })
    }

    /// True for a discrete prior whose atoms all carry the same mass.
    pub fn is_equiprobable(&self) -> bool {
        matches!(self.repr, Repr::Discrete { equiprobable: true, .. })
    }

    /// True when x² takes a single value over the support (e.g. ±a).
    pub(crate) fn has_constant_square(&self) -> bool {
        matches!(self.repr, Repr::Discrete { constant_square: true, .. })
    }

    pub fn mean(&self) -> f64 {
        match &self.repr {
            Repr::Discrete { atoms, .. } => atoms.iter().map(|a| a.prob * a.value).sum(),
            Repr::Gaussian { mean, .. } => *mean,
        }
    }

    pub fn variance(&self) -> f64 {
        match &self.repr {
            Repr::Discrete { atoms, .. } => {
                let m = self.mean();
                atoms.iter().map(|a| a.prob * (a.value - m).powi(2)).sum()
            }
            Repr::Gaussian { variance, .. } => *variance,
        }
    }

    /// E[X²].
    pub fn second_moment(&self) -> f64 {
        match &self.repr {
            Repr::Discrete { atoms, .. } => atoms.iter().map(|a| a.prob * a.value * a.value).sum(),
            Repr::Gaussian { mean, variance } => mean * mean + variance,
        }
    }

    /// Natural log of the prior mass (discrete) or density (Gaussian) at `x`.
    pub fn log_prob(&self, x: f64) -> Result<f64> {
        match &self.repr {
            Repr::Discrete { atoms, .. } => atoms
                .iter()
                .find(|a| a.value == x)
                .map(|a| a.prob.ln())
                .ok_or(Error::AtomNotFound(x)),
            Repr::Gaussian { mean, variance } => {
                Ok(-0.5 * (2.0 * PI * variance).ln() - (x - mean).powi(2) / (2.0 * variance))
            }
        }
    }

    /// Shannon entropy for discrete priors, differential entropy for Gaussians.
    pub fn entropy(&self) -> f64 {
        match &self.repr {
            Repr::Discrete { atoms, .. } => -atoms.iter().map(|a| a.prob * a.prob.ln()).sum::<f64>(),
            Repr::Gaussian { variance, .. } => 0.5 * (2.0 * PI * E * variance).ln(),
        }
    }

    pub fn spec(&self) -> PriorSpec {
        self.clone().into()
    }
}
