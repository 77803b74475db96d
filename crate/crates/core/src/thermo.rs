//! Mutual information from thermodynamic quantities.
//!
//! With U(y; γ) the internal energy, integrating the entropy change from
//! γ = 0 (no observation) to the target β and integrating by parts gives
//!
//! ```text
//! I(β) = −[γ·E_Y{U(Y; γ)}]₀^β + E_Y{ ∫₀^β (U(Y; γ) + γ·E_{X|Y}{∂E/∂γ}) dγ }
//! ```
//!
//! The γ·E[∂E/∂γ] correction accounts for energies that depend on the
//! temperature (any non-equiprobable prior). Dropping it gives the classical
//! route, which is only right for equiprobable discrete priors.
//!
//! E_Y is taken under p(Y; β) at the target β for the whole expression.

use serde::{Deserialize, Serialize};

use crate::boltzmann::{ChannelPoint, EnergyModel};
use crate::distributions::{InputDistribution, PriorView};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::quadrature::{adaptive_simpson, integrate_beta, GaussianRule, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ThermoClassical,
    ThermoGeneralized,
    Gsv,
    ClosedForm,
}

/// A mutual-information value in nats with its integration-by-parts split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MIResult {
    pub beta: f64,
    pub value_nats: f64,
    pub route: Route,
    pub boundary_term: f64,
    pub integral_term: f64,
}

impl MIResult {
    pub(crate) fn from_parts(beta: f64, route: Route, boundary_term: f64, integral_term: f64) -> Result<Self> {
        let value_nats = boundary_term + integral_term;
        if !value_nats.is_finite() {
            return Err(Error::NonFiniteValue { at: beta });
        }
        Ok(Self { beta, value_nats, route, boundary_term, integral_term })
    }
}

/// E[f(Y)] for Y ~ p(Y; β) = Σ_x P(x) N(x, 1/β), or N(m, s² + 1/β).
pub(crate) fn expect_output<F>(
    prior: &InputDistribution,
    beta: f64,
    rule: &GaussianRule,
    exec: Execution,
    f: F,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    let noise = 1.0 / beta;
    match prior.view() {
        PriorView::Discrete(atoms) => {
            let mut acc = 0.0;
            for a in atoms {
                acc += a.prob * rule.integrate_with(exec, &f, a.value, noise)?;
            }
            Ok(acc)
        }
        PriorView::Gaussian { mean, variance } => rule.integrate_with(exec, &f, mean, variance + noise),
    }
}

/// p(Y = y) at inverse temperature β.
pub fn output_density<'a>(model: impl Into<EnergyModel<'a>>, y: f64, beta: f64) -> Result<f64> {
    let beta = ChannelPoint::positive(beta)?.beta();
    let normal = |mean: f64, var: f64| (-(y - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
    Ok(match model.into().prior().view() {
        PriorView::Discrete(atoms) => atoms.iter().map(|a| a.prob * normal(a.value, 1.0 / beta)).sum(),
        PriorView::Gaussian { mean, variance } => normal(mean, variance + 1.0 / beta),
    })
}

/// −[γ·E_Y{U(Y; γ)}]₀^β with E_Y at the target β. The γ → 0 end is a
/// Richardson extrapolation from `beta_floor` and twice that.
fn boundary_term(model: &EnergyModel<'_>, beta: f64, rule: &GaussianRule, cfg: &QuadratureConfig) -> Result<f64> {
    let prior = model.prior();
    let scaled = |gamma: f64| {
        expect_output(prior, beta, rule, Execution::Sequential, |y| {
            Ok(gamma * model.internal_energy(y, gamma)?)
        })
    };
    let upper = scaled(beta)?;
    let h = cfg.beta_floor;
    let lower = 2.0 * scaled(h)? - scaled(2.0 * h)?;
    Ok(-(upper - lower))
}

/// Value of the lower boundary γ·E_Y{U} as γ → 0, as computed by the
/// Richardson step in [`mi_thermo_generalized`].
pub fn boundary_limit_at_zero<'a>(model: impl Into<EnergyModel<'a>>, beta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let model = model.into();
    let beta = ChannelPoint::positive(beta)?.beta();
    let rule = GaussianRule::from_config(cfg);
    let b0 = boundary_term(&model, beta, &rule, cfg)?;
    let upper = expect_output(model.prior(), beta, &rule, Execution::Sequential, |y| {
        Ok(beta * model.internal_energy(y, beta)?)
    })?;
    Ok(b0 + upper)
}

/// Mutual information by the classical entropy integral, without the
/// ∂E/∂β correction. Correct only for equiprobable discrete priors; other
/// priors are accepted with a warning so the discrepancy can be shown.
pub fn mi_thermo_classical<'a>(model: impl Into<EnergyModel<'a>>, beta: f64, cfg: &QuadratureConfig) -> Result<MIResult> {
    let model = model.into();
    let beta = ChannelPoint::positive(beta)?.beta();
    if model.is_temperature_dependent() {
        log::warn!("classical route on a non-equiprobable prior: {}", Error::NonEquiprobablePrior);
    }
    let rule = GaussianRule::from_config(cfg);
    let boundary = boundary_term(&model, beta, &rule, cfg)?;
    let integral = expect_output(model.prior(), beta, &rule, cfg.execution, |y| {
        integrate_beta(
            |g| model.moments(y, g).energy,
            0.0,
            beta,
            model.internal_energy_at_zero(y),
            cfg,
        )
    })?;
    MIResult::from_parts(beta, Route::ThermoClassical, boundary, integral)
}

/// Mutual information by the generalized entropy integral. The integrand
/// U + γ·E[∂E/∂γ] is formed before integrating; it stays finite as γ → 0
/// even when U alone grows like 1/γ.
pub fn mi_thermo_generalized<'a>(model: impl Into<EnergyModel<'a>>, beta: f64, cfg: &QuadratureConfig) -> Result<MIResult> {
    let model = model.into();
    let beta = ChannelPoint::positive(beta)?.beta();
    let rule = GaussianRule::from_config(cfg);
    let boundary = boundary_term(&model, beta, &rule, cfg)?;
    let integral = expect_output(model.prior(), beta, &rule, cfg.execution, |y| {
        integrate_beta(
            |g| model.generalized_integrand(y, g),
            0.0,
            beta,
            Some(model.generalized_integrand(y, 0.0)),
            cfg,
        )
    })?;
    MIResult::from_parts(beta, Route::ThermoGeneralized, boundary, integral)
}

/// H(X | Y; β) = E_Y{S(X | Y = y; β)}.
pub fn conditional_entropy<'a>(model: impl Into<EnergyModel<'a>>, beta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let model = model.into();
    let beta = ChannelPoint::positive(beta)?.beta();
    let rule = GaussianRule::from_config(cfg);
    expect_output(model.prior(), beta, &rule, Execution::Sequential, |y| model.posterior_entropy(y, beta))
}

/// S(X | Y = y; β) = S₀ − ∫_β^∞ γ·C_V(γ) dγ for a β-independent energy.
///
/// `s0` is the γ → ∞ entropy; `None` uses the ground-state degeneracy at
/// this y. The improper limit is truncated where the integrand drops below
/// `simpson_tol` and a further doubling changes the value by < 1e-8.
pub fn entropy_via_heat_capacity<'a>(
    model: impl Into<EnergyModel<'a>>,
    y: f64,
    beta: f64,
    s0: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let model = model.into();
    let beta = ChannelPoint::positive(beta)?.beta();
    if !model.prior().is_equiprobable() {
        return Err(Error::NonEquiprobablePrior);
    }
    let s0 = match s0 {
        Some(s) => s,
        None => model.ground_state_entropy(y)?,
    };
    let integrand = |g: f64| g * model.heat_capacity(y, g, cfg).unwrap_or(f64::NAN);

    let mut hi = 2.0 * beta + 8.0;
    let mut total = adaptive_simpson(integrand, beta, hi, cfg.simpson_tol, cfg.beta_grid_points)?;
    for _ in 0..40 {
        let tail = adaptive_simpson(integrand, hi, 2.0 * hi, cfg.simpson_tol, cfg.beta_grid_points)?;
        total += tail;
        if integrand(hi).abs() < cfg.simpson_tol && tail.abs() < 1e-8 {
            return Ok(s0 - total);
        }
        hi *= 2.0;
    }
    Err(Error::ToleranceNotReached { lo: beta, hi })
}
