//! Independent oracles: closed forms and seeded Monte-Carlo estimates.
//!
//! None of these go through the thermodynamic machinery. `mc_mmse` reuses
//! [`conditional_mean`](crate::estimation::conditional_mean) for the
//! estimator itself, and only that.
//!
//! # Random numbers
//!
//! Samples come from ChaCha8 seeded with `rng_seed`, one stream per batch of
//! [`BATCH_SIZE`] draws (stream id = batch index). A uniform in (0, 1) is
//! `((next_u64 >> 11) + 0.5) · 2⁻⁵³`; normals use Box-Muller on consecutive
//! uniform pairs, consuming both outputs. Batch statistics are merged in a
//! fixed pairwise tree, so results do not depend on the thread count.

use std::f64::consts::PI;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boltzmann::{ChannelPoint, EnergyModel};
use crate::distributions::{InputDistribution, PriorView};
use crate::error::{Error, Result};
use crate::estimation::conditional_mean;
use crate::exec::Execution;
use crate::quadrature::{adaptive_simpson, QuadratureConfig};

pub const BATCH_SIZE: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub mc_samples: u64,
    #[serde(alias = "seed")]
    pub rng_seed: u64,
    pub hermite_nodes: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            mc_samples: 1_000_000,
            rng_seed: 0x5EED_CAFE,
            hermite_nodes: 64,
            execution: Execution::default(),
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mc_samples < 100_000 {
            return Err(Error::InvalidConfig {
                field: "mc_samples",
                reason: "must be at least 100000".into(),
            });
        }
        if self.hermite_nodes == 0 {
            return Err(Error::InvalidConfig { field: "hermite_nodes", reason: "must be positive".into() });
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// |estimate − value| ≤ k·stderr.
    pub fn brackets(&self, value: f64, k: f64) -> bool {
        (self.estimate - value).abs() <= k * self.stderr
    }
}

/// Binary-input AWGN mutual information:
/// β − E_Z[ln cosh(β − √β·Z)], Z ~ N(0, 1).
pub fn mi_bernoulli_closed(beta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let beta = ChannelPoint::new(beta)?.beta();
    if beta == 0.0 {
        return Ok(0.0);
    }
    let root = beta.sqrt();
    let integrand = |z: f64| log_cosh(beta - root * z) * (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
    let t = cfg.y_truncation_sigmas;
    // ln cosh has a kink-like turn where its argument vanishes, at z = √β.
    let expectation = if root < t {
        adaptive_simpson(integrand, -t, root, cfg.simpson_tol, cfg.beta_grid_points)?
            + adaptive_simpson(integrand, root, t, cfg.simpson_tol, cfg.beta_grid_points)?
    } else {
        adaptive_simpson(integrand, -t, t, cfg.simpson_tol, cfg.beta_grid_points)?
    };
    Ok(beta - expectation)
}

/// ln cosh u without overflow.
pub fn log_cosh(u: f64) -> f64 {
    let a = u.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// ½ ln(1 + β), the capacity with a unit-variance Gaussian input.
pub fn mi_gaussian_closed(beta: f64) -> f64 {
    0.5 * beta.ln_1p()
}

/// Closed-form mutual information where one is known: any Gaussian prior,
/// or an equiprobable pair ±a.
pub fn closed_form_mi(prior: &InputDistribution, beta: f64, cfg: &QuadratureConfig) -> Option<Result<f64>> {
    match prior.view() {
        PriorView::Gaussian { variance, .. } => Some(Ok(mi_gaussian_closed(beta * variance))),
        PriorView::Discrete(atoms) if atoms.len() == 2 && prior.is_equiprobable() && atoms[0].value == -atoms[1].value => {
            let a2 = atoms[0].value * atoms[0].value;
            Some(mi_bernoulli_closed(beta * a2, cfg))
        }
        _ => None,
    }
}

#[derive(Debug, Clone, Copy)]
struct BatchStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl BatchStats {
    const EMPTY: Self = Self { n: 0, mean: 0.0, m2: 0.0 };

    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(a: Self, b: Self) -> Self {
        if a.n == 0 {
            return b;
        }
        if b.n == 0 {
            return a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        Self {
            n,
            mean: a.mean + d * b.n as f64 / n as f64,
            m2: a.m2 + b.m2 + d * d * (a.n as f64 * b.n as f64) / n as f64,
        }
    }
}

fn merge_pairwise(stats: &[BatchStats]) -> BatchStats {
    match stats.len() {
        0 => BatchStats::EMPTY,
        1 => stats[0],
        n => {
            let (l, r) = stats.split_at(n / 2);
            BatchStats::merge(merge_pairwise(l), merge_pairwise(r))
        }
    }
}

struct Sampler {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Sampler {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        self.spare = Some(r * (2.0 * PI * u2).sin());
        r * (2.0 * PI * u2).cos()
    }

    fn prior(&mut self, prior: &InputDistribution) -> f64 {
        match prior.view() {
            PriorView::Discrete(atoms) => {
                let u = self.uniform();
                let mut acc = 0.0;
                for a in atoms {
                    acc += a.prob;
                    if u < acc {
                        return a.value;
                    }
                }
                atoms[atoms.len() - 1].value
            }
            PriorView::Gaussian { mean, variance } => mean + variance.sqrt() * self.normal(),
        }
    }
}

/// Runs `draw` mc_samples times over seeded batches and reduces.
fn monte_carlo<F>(cfg: &OracleConfig, draw: F) -> McEstimate
where
    F: Fn(&mut Sampler) -> f64 + Sync + Send,
{
    let batches = cfg.mc_samples.div_ceil(BATCH_SIZE);
    let stats = cfg.execution.map_range(batches, |b| {
        let size = BATCH_SIZE.min(cfg.mc_samples - b * BATCH_SIZE);
        let mut sampler = Sampler::new(cfg.rng_seed, b);
        let mut s = BatchStats::EMPTY;
        for _ in 0..size {
            s.push(draw(&mut sampler));
        }
        s
    });
    let total = merge_pairwise(&stats);
    let var = if total.n > 1 { total.m2 / (total.n - 1) as f64 } else { 0.0 };
    McEstimate {
        estimate: total.mean,
        stderr: (var / total.n as f64).sqrt(),
        samples: total.n,
        seed: cfg.rng_seed,
    }
}

/// Monte-Carlo estimate of I = E[ln p(Y | X) − ln p(Y)].
pub fn mc_mutual_information(prior: &InputDistribution, beta: f64, cfg: &OracleConfig) -> Result<McEstimate> {
    let beta = ChannelPoint::positive(beta)?.beta();
    let sd = 1.0 / beta.sqrt();
    Ok(monte_carlo(cfg, |s| {
        let x = s.prior(prior);
        let y = x + sd * s.normal();
        let log_lik = -0.5 * beta * (y - x).powi(2);
        // Both densities share the factor √(β/2π); it cancels.
        let log_marg = match prior.view() {
            PriorView::Discrete(atoms) => {
                let terms = atoms.iter().map(|a| a.prob.ln() - 0.5 * beta * (y - a.value).powi(2));
                let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
                max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
            }
            PriorView::Gaussian { mean, variance } => {
                let total = variance + 1.0 / beta;
                -0.5 * (y - mean).powi(2) / total - 0.5 * (beta * total).ln()
            }
        };
        log_lik - log_marg
    }))
}

/// Monte-Carlo estimate of E[(X − E[X | Y])²].
pub fn mc_mmse(prior: &InputDistribution, beta: f64, cfg: &OracleConfig) -> Result<McEstimate> {
    let beta = ChannelPoint::new(beta)?.beta();
    let model = EnergyModel::new(prior);
    let sd = if beta > 0.0 { 1.0 / beta.sqrt() } else { 0.0 };
    Ok(monte_carlo(cfg, |s| {
        let x = s.prior(prior);
        let y = x + sd * s.normal();
        let est = conditional_mean(model, y, beta).unwrap_or(f64::NAN);
        (x - est).powi(2)
    }))
}
