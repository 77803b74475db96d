//! The Gaussian channel Y = X + N(0, 1/β) read as a canonical ensemble.
//!
//! Microstates are the input values x. At observation y and inverse
//! temperature β (the snr) the energy is
//!
//! ```text
//! E(x | y; β) = −x·y + x²/2 − ln P(x)/β
//! ```
//!
//! and the Boltzmann law exp(−β·E)/Z is exactly the posterior P(x | y).
//!
//! Terms that take the same value at every point of the support are dropped:
//! x²/2 when all atoms share |x|, the log-prior when the prior is
//! equiprobable, and ½·ln(2πσ²)/β for a Gaussian prior. Observables do not
//! depend on that choice; `log Z` and `U` shift by −β·c and +c under a
//! constant shift c, which [`EnergyModel::with_offset`] exposes.

use std::f64::consts::{E, PI};

use crate::distributions::{Atom, InputDistribution, PriorView};
use crate::error::{Error, Result};
use crate::quadrature::{central_difference, QuadratureConfig};

/// An inverse temperature β ≥ 0, i.e. the channel snr. T = 1/β.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ChannelPoint(f64);

impl ChannelPoint {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta >= 0.0 {
            Ok(Self(beta))
        } else {
            Err(Error::InvalidBeta(beta))
        }
    }

    pub fn positive(beta: f64) -> Result<Self> {
        let p = Self::new(beta)?;
        if beta == 0.0 {
            return Err(Error::BetaZero);
        }
        Ok(p)
    }

    pub fn beta(self) -> f64 {
        self.0
    }

    pub fn snr(self) -> f64 {
        self.0
    }

    pub fn temperature(self) -> f64 {
        1.0 / self.0
    }

    pub fn snr_db(self) -> f64 {
        10.0 * self.0.log10()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PosteriorLaw {
    Discrete(Vec<Atom>),
    Gaussian { mean: f64, variance: f64 },
}

/// P(X | Y = y) at inverse temperature β, with its log-partition value.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub law: PosteriorLaw,
    pub log_partition: f64,
    pub beta: f64,
    pub y: f64,
}

impl Posterior {
    pub fn weights(&self) -> Option<&[Atom]> {
        match &self.law {
            PosteriorLaw::Discrete(w) => Some(w),
            PosteriorLaw::Gaussian { .. } => None,
        }
    }

    pub fn mean(&self) -> f64 {
        match &self.law {
            PosteriorLaw::Discrete(w) => w.iter().map(|a| a.prob * a.value).sum(),
            PosteriorLaw::Gaussian { mean, .. } => *mean,
        }
    }

    pub fn variance(&self) -> f64 {
        match &self.law {
            PosteriorLaw::Discrete(w) => {
                let m = self.mean();
                w.iter().map(|a| a.prob * (a.value - m).powi(2)).sum()
            }
            PosteriorLaw::Gaussian { variance, .. } => *variance,
        }
    }

    /// −Σ w ln w, or ½ ln(2πe·σ²) for a Gaussian posterior.
    pub fn entropy(&self) -> f64 {
        match &self.law {
            PosteriorLaw::Discrete(w) => -w
                .iter()
                .filter(|a| a.prob > 0.0)
                .map(|a| a.prob * a.prob.ln())
                .sum::<f64>(),
            PosteriorLaw::Gaussian { variance, .. } => 0.5 * (2.0 * PI * E * variance).ln(),
        }
    }
}

/// Posterior summary computed without allocating.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Moments {
    pub log_z: f64,
    pub mean: f64,
    pub variance: f64,
    /// U = E[E(X)].
    pub energy: f64,
    /// E[∂E(X)/∂β].
    pub energy_dbeta: f64,
}

/// A prior together with an additive energy offset.
#[derive(Debug, Clone, Copy)]
pub struct EnergyModel<'a> {
    prior: &'a InputDistribution,
    offset: f64,
}

impl<'a> From<&'a InputDistribution> for EnergyModel<'a> {
    fn from(prior: &'a InputDistribution) -> Self {
        Self { prior, offset: 0.0 }
    }
}

impl<'a> From<&EnergyModel<'a>> for EnergyModel<'a> {
    fn from(m: &EnergyModel<'a>) -> Self {
        *m
    }
}

impl<'a> EnergyModel<'a> {
    pub fn new(prior: &'a InputDistribution) -> Self {
        prior.into()
    }

    /// Adds `c` to every energy level.
    pub fn with_offset(self, c: f64) -> Self {
        Self { offset: self.offset + c, ..self }
    }

    pub fn prior(&self) -> &'a InputDistribution {
        self.prior
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Whether the energy depends on β (a retained log-prior term).
    pub fn is_temperature_dependent(&self) -> bool {
        !self.prior.is_equiprobable()
    }

    fn keeps_square(&self) -> bool {
        !self.prior.has_constant_square()
    }

    fn keeps_log_prior(&self) -> bool {
        !self.prior.is_equiprobable()
    }

    /// The β-free part of the energy of atom x.
    fn discrete_base(&self, x: f64, y: f64) -> f64 {
        let sq = if self.keeps_square() { 0.5 * x * x } else { 0.0 };
        -x * y + sq + self.offset
    }

    pub fn energy(&self, x: f64, y: f64, beta: f64) -> Result<f64> {
        let beta = ChannelPoint::new(beta)?.beta();
        match self.prior.view() {
            PriorView::Discrete(_) => {
                let lp = self.prior.log_prob(x)?;
                let base = self.discrete_base(x, y);
                if !self.keeps_log_prior() {
                    return Ok(base);
                }
                if beta == 0.0 {
                    return Err(Error::BetaZero);
                }
                Ok(base - lp / beta)
            }
            PriorView::Gaussian { mean, variance } => {
                if beta == 0.0 {
                    return Err(Error::BetaZero);
                }
                Ok(-x * y + 0.5 * x * x + (x - mean).powi(2) / (2.0 * variance * beta) + self.offset)
            }
        }
    }

    pub fn energy_dbeta(&self, x: f64, _y: f64, beta: f64) -> Result<f64> {
        let beta = ChannelPoint::positive(beta)?.beta();
        match self.prior.view() {
            PriorView::Discrete(_) => {
                let lp = self.prior.log_prob(x)?;
                Ok(if self.keeps_log_prior() { lp / (beta * beta) } else { 0.0 })
            }
            PriorView::Gaussian { mean, variance } => Ok(-(x - mean).powi(2) / (2.0 * variance * beta * beta)),
        }
    }

    pub fn posterior(&self, y: f64, beta: f64) -> Result<Posterior> {
        let beta = ChannelPoint::new(beta)?.beta();
        match self.prior.view() {
            PriorView::Discrete(atoms) => {
                let scores: Vec<f64> = atoms.iter().map(|a| self.discrete_score(a, y, beta)).collect();
                let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = scores.iter().map(|s| (s - max).exp()).sum();
                let weights = atoms
                    .iter()
                    .zip(&scores)
                    .map(|(a, s)| Atom { value: a.value, prob: (s - max).exp() / sum })
                    .collect();
                Ok(Posterior {
                    law: PosteriorLaw::Discrete(weights),
                    log_partition: max + sum.ln(),
                    beta,
                    y,
                })
            }
            PriorView::Gaussian { mean, variance } => {
                let g = GaussianPosterior::new(mean, variance, y, beta, self.offset);
                Ok(Posterior {
                    law: PosteriorLaw::Gaussian { mean: g.mean, variance: g.variance },
                    log_partition: g.log_z,
                    beta,
                    y,
                })
            }
        }
    }

    /// −β·E(x), written so that β = 0 is well defined.
    fn discrete_score(&self, a: &Atom, y: f64, beta: f64) -> f64 {
        let lp = if self.keeps_log_prior() { a.prob.ln() } else { 0.0 };
        -beta * self.discrete_base(a.value, y) + lp
    }

    pub(crate) fn moments(&self, y: f64, beta: f64) -> Moments {
        match self.prior.view() {
            PriorView::Discrete(atoms) => self.discrete_moments(atoms, y, beta),
            PriorView::Gaussian { mean, variance } => {
                let g = GaussianPosterior::new(mean, variance, y, beta, self.offset);
                let second = g.variance + g.mean * g.mean;
                let centered = g.variance + (g.mean - mean).powi(2);
                let mechanical = -y * g.mean + 0.5 * second + self.offset;
                Moments {
                    log_z: g.log_z,
                    mean: g.mean,
                    variance: g.variance,
                    energy: mechanical + centered / (2.0 * variance * beta),
                    energy_dbeta: -centered / (2.0 * variance * beta * beta),
                }
            }
        }
    }

    fn discrete_moments(&self, atoms: &[Atom], y: f64, beta: f64) -> Moments {
        let max = atoms
            .iter()
            .map(|a| self.discrete_score(a, y, beta))
            .fold(f64::NEG_INFINITY, f64::max);
        let keep_lp = self.keeps_log_prior();
        let (mut z, mut m1, mut m2, mut mech, mut lpm) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for a in atoms {
            let w = (self.discrete_score(a, y, beta) - max).exp();
            z += w;
            m1 += w * a.value;
            m2 += w * a.value * a.value;
            mech += w * self.discrete_base(a.value, y);
            if keep_lp {
                lpm += w * a.prob.ln();
            }
        }
        let (m1, m2, mech, lpm) = (m1 / z, m2 / z, mech / z, lpm / z);
        Moments {
            log_z: max + z.ln(),
            mean: m1,
            variance: (m2 - m1 * m1).max(0.0),
            energy: mech - lpm / beta,
            energy_dbeta: lpm / (beta * beta),
        }
    }

    /// U(y; β) = E_{X|Y}[E(X | y; β)].
    pub fn internal_energy(&self, y: f64, beta: f64) -> Result<f64> {
        let beta = ChannelPoint::positive(beta)?.beta();
        Ok(self.moments(y, beta).energy)
    }

    pub fn log_partition(&self, y: f64, beta: f64) -> Result<f64> {
        let beta = ChannelPoint::positive(beta)?.beta();
        Ok(self.moments(y, beta).log_z)
    }

    pub fn posterior_entropy(&self, y: f64, beta: f64) -> Result<f64> {
        Ok(self.posterior(y, beta)?.entropy())
    }

    pub fn conditional_mean(&self, y: f64, beta: f64) -> Result<f64> {
        let beta = ChannelPoint::new(beta)?.beta();
        Ok(self.moments(y, beta).mean)
    }

    /// C_V(β) = dU/dβ by central difference with step `cfg.fd_step`.
    pub fn heat_capacity(&self, y: f64, beta: f64, cfg: &QuadratureConfig) -> Result<f64> {
        ChannelPoint::positive(beta)?;
        central_difference(|b| self.moments(y, b).energy, beta, cfg.fd_step)
    }

    /// U + γ·E[∂E/∂γ], the integrand of the generalized entropy integral.
    /// At γ = 0 the finite limit is returned.
    pub fn generalized_integrand(&self, y: f64, gamma: f64) -> f64 {
        if gamma == 0.0 {
            return self.mechanical_at_prior(y);
        }
        let m = self.moments(y, gamma);
        m.energy + gamma * m.energy_dbeta
    }

    /// lim_{γ→0} U(y; γ) when finite, i.e. when the energy does not carry a
    /// 1/γ term.
    pub fn internal_energy_at_zero(&self, y: f64) -> Option<f64> {
        match self.prior.view() {
            PriorView::Discrete(_) if !self.keeps_log_prior() => Some(self.mechanical_at_prior(y)),
            _ => None,
        }
    }

    /// lim_{γ→0} γ·U(y; γ): H(X) for a retained log-prior, ½ for a
    /// Gaussian prior, 0 otherwise.
    pub fn scaled_energy_at_zero(&self) -> f64 {
        match self.prior.view() {
            PriorView::Discrete(_) if self.keeps_log_prior() => self.prior.entropy(),
            PriorView::Discrete(_) => 0.0,
            PriorView::Gaussian { .. } => 0.5,
        }
    }

    fn mechanical_at_prior(&self, y: f64) -> f64 {
        match self.prior.view() {
            PriorView::Discrete(atoms) => atoms.iter().map(|a| a.prob * self.discrete_base(a.value, y)).sum(),
            PriorView::Gaussian { mean, variance } => {
                -y * mean + 0.5 * (variance + mean * mean) + self.offset
            }
        }
    }

    /// Entropy of the γ → ∞ posterior at fixed y: ln of the ground-state
    /// degeneracy for a β-independent discrete energy.
    pub fn ground_state_entropy(&self, y: f64) -> Result<f64> {
        let atoms = match self.prior.view() {
            PriorView::Discrete(atoms) if !self.keeps_log_prior() => atoms,
            _ => return Err(Error::NonEquiprobablePrior),
        };
        let energies: Vec<f64> = atoms.iter().map(|a| self.discrete_base(a.value, y)).collect();
        let min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale = min.abs().max(1.0);
        let degeneracy = energies.iter().filter(|e| (*e - min).abs() <= 1e-12 * scale).count();
        Ok((degeneracy as f64).ln())
    }
}

struct GaussianPosterior {
    mean: f64,
    variance: f64,
    log_z: f64,
}

impl GaussianPosterior {
    /// Completes the square in −β·E(x) for a N(m, s²) prior.
    fn new(m: f64, s2: f64, y: f64, beta: f64, offset: f64) -> Self {
        let precision = beta + 1.0 / s2;
        let linear = beta * y + m / s2;
        let log_z = linear * linear / (2.0 * precision) - m * m / (2.0 * s2) - beta * offset
            + 0.5 * (2.0 * PI / precision).ln();
        Self { mean: linear / precision, variance: 1.0 / precision, log_z }
    }
}

pub fn energy<'a>(model: impl Into<EnergyModel<'a>>, x: f64, y: f64, beta: f64) -> Result<f64> {
    model.into().energy(x, y, beta)
}

pub fn energy_dbeta<'a>(model: impl Into<EnergyModel<'a>>, x: f64, y: f64, beta: f64) -> Result<f64> {
    model.into().energy_dbeta(x, y, beta)
}

pub fn posterior<'a>(model: impl Into<EnergyModel<'a>>, y: f64, beta: f64) -> Result<Posterior> {
    model.into().posterior(y, beta)
}

pub fn internal_energy<'a>(model: impl Into<EnergyModel<'a>>, y: f64, beta: f64) -> Result<f64> {
    model.into().internal_energy(y, beta)
}

pub fn posterior_entropy<'a>(model: impl Into<EnergyModel<'a>>, y: f64, beta: f64) -> Result<f64> {
    model.into().posterior_entropy(y, beta)
}

pub fn log_partition<'a>(model: impl Into<EnergyModel<'a>>, y: f64, beta: f64) -> Result<f64> {
    model.into().log_partition(y, beta)
}

pub fn heat_capacity<'a>(
    model: impl Into<EnergyModel<'a>>,
    y: f64,
    beta: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    model.into().heat_capacity(y, beta, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bern() -> InputDistribution {
        InputDistribution::bernoulli_half()
    }

    fn gauss() -> InputDistribution {
        InputDistribution::standard_gaussian()
    }

    fn skewed() -> InputDistribution {
        InputDistribution::discrete(&[(-1.0, 0.25), (1.0, 0.75)]).unwrap()
    }

    fn three_point() -> InputDistribution {
        InputDistribution::discrete(&[(0.0, 0.5), (1.0, 0.3), (-2.0, 0.2)]).unwrap()
    }

    #[test]
    fn channel_point() {
        assert_eq!(ChannelPoint::new(-1.0), Err(Error::InvalidBeta(-1.0)));
        assert_eq!(ChannelPoint::positive(0.0), Err(Error::BetaZero));
        let p = ChannelPoint::new(10.0).unwrap();
        assert_eq!(p.snr_db(), 10.0);
        assert_eq!(p.temperature(), 0.1);
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(&bern(), 1.0, 2.0, 0.7).unwrap(), -2.0);
        assert!((energy(&gauss(), 1.0, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let d = three_point();
        let e = energy(&d, 0.0, 3.3, 2.0).unwrap();
        assert!((e + 0.5f64.ln() / 2.0).abs() < 1e-15);
        assert_eq!(energy(&bern(), 0.5, 1.0, 1.0), Err(Error::AtomNotFound(0.5)));
        assert_eq!(energy(&skewed(), 1.0, 1.0, 0.0), Err(Error::BetaZero));
    }

    #[test]
    fn energy_derivative_examples() {
        assert!((energy_dbeta(&gauss(), 2.0, 0.3, 1.0).unwrap() + 2.0).abs() < 1e-15);
        for (y, b) in [(0.3, 0.5), (-2.0, 4.0)] {
            assert_eq!(energy_dbeta(&bern(), 1.0, y, b).unwrap(), 0.0);
        }
    }

    #[test]
    fn energy_derivative_matches_finite_difference() {
        let cases = [(gauss(), 0.7), (skewed(), 1.0), (three_point(), -2.0), (bern(), -1.0)];
        for (d, x) in &cases {
            for &(y, b) in &[(0.4, 0.8), (-1.2, 2.5), (2.0, 0.3)] {
                let fd = central_difference(|bb| energy(d, *x, y, bb).unwrap(), b, 1e-5).unwrap();
                let an = energy_dbeta(d, *x, y, b).unwrap();
                assert!((fd - an).abs() < 1e-6, "{fd} vs {an}");
            }
        }
    }

    #[test]
    fn posterior_examples() {
        let p = posterior(&gauss(), 2.0, 1.0).unwrap();
        assert!((p.mean() - 1.0).abs() < 1e-15);
        assert!((p.variance() - 0.5).abs() < 1e-15);

        let p = posterior(&bern(), 0.0, 3.0).unwrap();
        for a in p.weights().unwrap() {
            assert!((a.prob - 0.5).abs() < 1e-15);
        }

        let p = posterior(&bern(), 1.0, 1.0).unwrap();
        let up = p.weights().unwrap().iter().find(|a| a.value == 1.0).unwrap().prob;
        let want = 1f64.exp() / (1f64.exp() + (-1f64).exp());
        assert!((up - want).abs() < 1e-15);
        assert!((up - 0.8808).abs() < 1e-4);
    }

    #[test]
    fn posterior_at_zero_is_prior() {
        let d = three_point();
        let p = posterior(&d, 1.7, 0.0).unwrap();
        for (a, b) in p.weights().unwrap().iter().zip(d.atoms().unwrap()) {
            assert!((a.prob - b.prob).abs() < 1e-15);
        }
    }

    #[test]
    fn posterior_survives_large_beta_y() {
        let p = posterior(&bern(), 50.0, 400.0).unwrap();
        let w = p.weights().unwrap();
        assert_eq!(w[0].prob, 0.0);
        assert_eq!(w[1].prob, 1.0);
        assert!(p.log_partition.is_finite());
        assert!(p.entropy().abs() < 1e-300);
    }

    #[test]
    fn internal_energy_examples() {
        let u = internal_energy(&bern(), 1.0, 1.0).unwrap();
        assert!((u + 1f64.tanh()).abs() < 1e-15);
        assert!((u + 0.7616).abs() < 1e-4);
        assert_eq!(internal_energy(&bern(), 0.0, 2.0).unwrap(), 0.0);
        let u = internal_energy(&gauss(), 1.0, 1.0).unwrap();
        assert!((u - 0.25).abs() < 1e-15);
    }

    #[test]
    fn gaussian_internal_energy_closed_form() {
        for &(y, b) in &[(0.3, 0.2), (-1.5, 2.0), (2.2, 7.0)] {
            let u = internal_energy(&gauss(), y, b).unwrap();
            let want = -y * y * b / (2.0 * (1.0 + b)) + 1.0 / (2.0 * b);
            assert!((u - want).abs() < 1e-13);
            let m = EnergyModel::new(&gauss()).moments(y, b);
            let want_de = -(1.0 / (1.0 + b) + b * b * y * y / (1.0 + b).powi(2)) / (2.0 * b * b);
            assert!((m.energy_dbeta - want_de).abs() < 1e-13);
        }
    }

    #[test]
    fn posterior_entropy_examples() {
        let ln2 = std::f64::consts::LN_2;
        assert!((posterior_entropy(&bern(), 0.0, 5.0).unwrap() - ln2).abs() < 1e-15);
        assert!(posterior_entropy(&bern(), 60.0, 1.0).unwrap() < 1e-40);
        let s = posterior_entropy(&gauss(), -3.0, 1.0).unwrap();
        assert!((s - 0.5 * (PI * E).ln()).abs() < 1e-15);
        assert!((s - 1.0724).abs() < 1e-4);
    }

    #[test]
    fn log_partition_examples() {
        let lz = log_partition(&bern(), 1.0, 1.0).unwrap();
        let direct = (1f64.exp() + (-1f64).exp()).ln();
        assert!((lz - direct).abs() < 1e-15);
        assert!((lz - 1.1269).abs() < 1e-4);

        let (y, b) = (0.7, 2.3);
        let d = bern();
        let m = EnergyModel::new(&d);
        let resid = m.log_partition(y, b).unwrap() + b * m.internal_energy(y, b).unwrap()
            - m.posterior_entropy(y, b).unwrap();
        assert!(resid.abs() < 1e-10);

        let lz0 = log_partition(&three_point(), 0.4, 1e-12).unwrap();
        assert!(lz0.abs() < 1e-11);
        let lz0 = log_partition(&bern(), 0.4, 1e-12).unwrap();
        assert!((lz0 - 2f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn gaussian_log_partition_matches_quadrature() {
        // Z = ∫ exp(−β E(x)) dx, by brute-force trapezoid.
        let d = InputDistribution::gaussian(0.5, 2.0).unwrap();
        let m = EnergyModel::new(&d);
        for &(y, b) in &[(0.3, 0.7), (-1.0, 3.0)] {
            let h = 1e-3;
            let z: f64 = (-20_000..=20_000)
                .map(|i| {
                    let x = i as f64 * h;
                    (-b * m.energy(x, y, b).unwrap()).exp() * h
                })
                .sum();
            assert!((z.ln() - m.log_partition(y, b).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn heat_capacity_examples() {
        let cfg = QuadratureConfig::default();
        let c = heat_capacity(&bern(), 1.0, 1.0, &cfg).unwrap();
        let sech2 = 1.0 / 1f64.cosh().powi(2);
        assert!((c + sech2).abs() < 1e-5);
        assert!((c + 0.4200).abs() < 1e-4);
        assert_eq!(heat_capacity(&bern(), 0.0, 1.0, &cfg).unwrap(), 0.0);
        let c = heat_capacity(&gauss(), 0.0, 1.0, &cfg).unwrap();
        assert!((c + 0.5).abs() < 1e-4);
        assert!(heat_capacity(&bern(), 1.0, 5e-4, &cfg).is_err());
    }

    #[test]
    fn generalized_integrand_closed_form() {
        // U + γE[∂E/∂γ] = 1/(2(1+γ)) − γy²/(2(1+γ)) − γy²/(2(1+γ)²) for N(0,1).
        let d = gauss();
        let m = EnergyModel::new(&d);
        for &y in &[0.0, 0.8, -2.5] {
            for &g in &[1e-8f64, 1e-6, 0.3, 4.0] {
                let want = 1.0 / (2.0 * (1.0 + g)) - g * y * y / (2.0 * (1.0 + g))
                    - g * y * y / (2.0 * (1.0 + g).powi(2));
                assert!((m.generalized_integrand(y, g) - want).abs() < 1e-8, "y={y} g={g}");
            }
            assert_eq!(m.generalized_integrand(y, 0.0), 0.5);
            let near = m.generalized_integrand(y, 1e-8);
            let nearer = m.generalized_integrand(y, 1e-6);
            assert!((near - 0.5).abs() < 1e-7 && (nearer - 0.5).abs() < 1e-5);
        }
    }

    #[test]
    fn scaled_energy_limits() {
        let gd = gauss();
        let g = EnergyModel::new(&gd);
        assert!((1e-9 * g.internal_energy(1.3, 1e-9).unwrap() - g.scaled_energy_at_zero()).abs() < 1e-8);
        let s = skewed();
        let sm = EnergyModel::new(&s);
        assert!((1e-9 * sm.internal_energy(1.3, 1e-9).unwrap() - s.entropy()).abs() < 1e-8);
        assert_eq!(EnergyModel::new(&bern()).scaled_energy_at_zero(), 0.0);
    }

    #[test]
    fn discretized_gaussian_matches_closed_form() {
        let n = 401;
        let sd = 1.0;
        let raw: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let x = -8.0 * sd + 16.0 * sd * i as f64 / (n - 1) as f64;
                (x, (-0.5 * x * x).exp())
            })
            .collect();
        let total: f64 = raw.iter().map(|a| a.1).sum();
        let atoms: Vec<(f64, f64)> = raw.iter().map(|&(x, w)| (x, w / total)).collect();
        let disc = InputDistribution::discrete(&atoms).unwrap();
        for &(y, b) in &[(0.5, 1.0), (-1.3, 3.0), (2.0, 0.2)] {
            let pd = posterior(&disc, y, b).unwrap();
            let pg = posterior(&gauss(), y, b).unwrap();
            assert!((pd.mean() - pg.mean()).abs() < 1e-4);
            assert!((pd.variance() - pg.variance()).abs() < 1e-4);
        }
    }

    #[test]
    fn small_beta_posterior_is_prior() {
        for d in [skewed(), three_point(), bern()] {
            for &y in &[-3.0, 0.2, 5.0] {
                let p = posterior(&d, y, 1e-8).unwrap();
                let tv: f64 = p
                    .weights()
                    .unwrap()
                    .iter()
                    .zip(d.atoms().unwrap())
                    .map(|(a, b)| (a.prob - b.prob).abs())
                    .sum::<f64>()
                    / 2.0;
                assert!(tv < 1e-6);
            }
        }
    }

    #[test]
    fn ground_state_entropy() {
        let d = bern();
        let m = EnergyModel::new(&d);
        assert!((m.ground_state_entropy(0.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(m.ground_state_entropy(1.0).unwrap(), 0.0);
        assert!(EnergyModel::new(&skewed()).ground_state_entropy(0.0).is_err());
    }

    fn random_discrete() -> impl Strategy<Value = InputDistribution> {
        prop::collection::btree_map(-20i32..20, 0.05f64..1.0, 2..8).prop_map(|m| {
            let total: f64 = m.values().sum();
            let atoms: Vec<(f64, f64)> = m.into_iter().map(|(v, w)| (v as f64 * 0.3, w / total)).collect();
            InputDistribution::discrete(&atoms).unwrap()
        })
    }

    proptest! {
        #[test]
        fn weights_are_normalized(d in random_discrete(), y in -10.0f64..10.0, b in 1e-6f64..50.0) {
            let p = posterior(&d, y, b).unwrap();
            let w = p.weights().unwrap();
            let sum: f64 = w.iter().map(|a| a.prob).sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(w.iter().all(|a| (0.0..=1.0).contains(&a.prob)));
        }

        #[test]
        fn thermodynamic_identity(d in random_discrete(), y in -5.0f64..5.0, b in 1e-3f64..20.0) {
            let m = EnergyModel::new(&d);
            let r = m.log_partition(y, b).unwrap() + b * m.internal_energy(y, b).unwrap()
                - m.posterior_entropy(y, b).unwrap();
            prop_assert!(r.abs() < 1e-9, "residual {}", r);
        }

        #[test]
        fn gauge_invariance(d in random_discrete(), y in -5.0f64..5.0, b in 1e-2f64..10.0, c in -10.0f64..10.0) {
            let m0 = EnergyModel::new(&d);
            let m1 = m0.with_offset(c);
            let p0 = m0.posterior(y, b).unwrap();
            let p1 = m1.posterior(y, b).unwrap();
            for (a0, a1) in p0.weights().unwrap().iter().zip(p1.weights().unwrap()) {
                prop_assert!((a0.prob - a1.prob).abs() < 1e-12);
            }
            prop_assert!((p0.entropy() - p1.entropy()).abs() < 1e-12);
            prop_assert!((m0.conditional_mean(y, b).unwrap() - m1.conditional_mean(y, b).unwrap()).abs() < 1e-12);
            let dlz = m1.log_partition(y, b).unwrap() - m0.log_partition(y, b).unwrap();
            prop_assert!((dlz + b * c).abs() < 1e-12 * (1.0 + (b * c).abs()) * 100.0);
            let du = m1.internal_energy(y, b).unwrap() - m0.internal_energy(y, b).unwrap();
            prop_assert!((du - c).abs() < 1e-12 * (1.0 + c.abs()) * 100.0);
        }
    }
}
