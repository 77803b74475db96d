//! Conditional-mean estimation, MMSE and the I-MMSE route to mutual
//! information.
//!
//! The channel is used in the form Y = X + N(0, 1/β). The scaled form
//! Y' = √β·X + N(0, 1) carries the same information about X (Y' = √β·Y), so
//! every quantity here applies to it unchanged.

use serde::{Deserialize, Serialize};

use crate::boltzmann::{ChannelPoint, EnergyModel};
use crate::error::Result;
use crate::exec::Execution;
use crate::quadrature::{integrate_beta, try_central_difference, GaussianRule, QuadratureConfig};
use crate::thermo::{expect_output, mi_thermo_generalized, MIResult, Route};

/// Both sides of dI/dβ = ½·mmse(β) at one β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GsvCheck {
    pub beta: f64,
    /// Central difference of the generalized thermodynamic MI.
    pub lhs_di_dbeta: f64,
    pub rhs_half_mmse: f64,
    pub residual: f64,
}

/// E[X | Y = y] at inverse temperature β.
pub fn conditional_mean<'a>(model: impl Into<EnergyModel<'a>>, y: f64, beta: f64) -> Result<f64> {
    model.into().conditional_mean(y, beta)
}

/// mmse(β) = E_Y[Var(X | Y)], with mmse(0) the prior variance.
pub fn mmse<'a>(model: impl Into<EnergyModel<'a>>, beta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let model = model.into();
    let beta = ChannelPoint::new(beta)?.beta();
    if beta == 0.0 {
        return Ok(model.prior().variance());
    }
    let rule = GaussianRule::from_config(cfg);
    mmse_with_rule(&model, beta, &rule)
}

fn mmse_with_rule(model: &EnergyModel<'_>, beta: f64, rule: &GaussianRule) -> Result<f64> {
    expect_output(model.prior(), beta, rule, Execution::Sequential, |y| Ok(model.moments(y, beta).variance))
}

/// I(β) = ½ ∫₀^β mmse(γ) dγ.
pub fn mi_gsv<'a>(model: impl Into<EnergyModel<'a>>, beta: f64, cfg: &QuadratureConfig) -> Result<MIResult> {
    let model = model.into();
    let beta = ChannelPoint::new(beta)?.beta();
    if beta == 0.0 {
        return MIResult::from_parts(0.0, Route::Gsv, 0.0, 0.0);
    }
    let rule = GaussianRule::from_config(cfg);
    let prior_variance = model.prior().variance();
    let integral = integrate_beta(
        |g| mmse_with_rule(&model, g, &rule).unwrap_or(f64::NAN),
        0.0,
        beta,
        Some(prior_variance),
        cfg,
    )?;
    MIResult::from_parts(beta, Route::Gsv, 0.0, 0.5 * integral)
}

/// Compares the β-derivative of the thermodynamic MI with ½·mmse(β).
pub fn gsv_check<'a>(model: impl Into<EnergyModel<'a>>, beta: f64, cfg: &QuadratureConfig) -> Result<GsvCheck> {
    let model = model.into();
    let beta = ChannelPoint::positive(beta)?.beta();
    let lhs = try_central_difference(|b| Ok(mi_thermo_generalized(model, b, cfg)?.value_nats), beta, cfg.fd_step)?;
    let rhs = 0.5 * mmse(model, beta, cfg)?;
    Ok(GsvCheck { beta, lhs_di_dbeta: lhs, rhs_half_mmse: rhs, residual: lhs - rhs })
}
