//! One-dimensional integration primitives.
//!
//! Two axes need integrating. Expectations over the channel output `y` are
//! Gaussian-weighted and use fixed-node rules ([`GaussianRule`]); integrals
//! over the inverse temperature use adaptive Simpson on a fixed initial
//! partition ([`integrate_beta`]). Node placement is deterministic, so
//! repeated runs are bit-identical.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Gauss-Legendre order used on each panel of the composite y-rule.
pub const LEGENDRE_ORDER: usize = 8;

const MAX_SIMPSON_DEPTH: u32 = 60;

/// Fixed-node rule used for expectations over y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YRule {
    /// Gauss-Hermite with `hermite_nodes` nodes. Exact for polynomials.
    Hermite,
    /// Composite Gauss-Legendre over mean ± `y_truncation_sigmas`·σ with
    /// `y_panels` panels. Robust for integrands with nearby complex poles
    /// (tanh, log cosh at large β).
    Legendre,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub hermite_nodes: usize,
    pub y_rule: YRule,
    pub y_panels: usize,
    pub y_truncation_sigmas: f64,
    /// Initial number of Simpson panels on any β-interval.
    pub beta_grid_points: usize,
    /// Replaces β = 0 as the lower limit of β-integrals.
    pub beta_floor: f64,
    pub simpson_tol: f64,
    pub fd_step: f64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            hermite_nodes: 64,
            y_rule: YRule::Legendre,
            y_panels: 64,
            y_truncation_sigmas: 10.0,
            beta_grid_points: 64,
            beta_floor: 1e-6,
            simpson_tol: 1e-10,
            fd_step: 1e-3,
            execution: Execution::default(),
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason: &str| {
            Err(Error::InvalidConfig { field, reason: reason.to_string() })
        };
        if self.hermite_nodes < 16 {
            return bad("hermite_nodes", "must be at least 16");
        }
        if self.y_panels == 0 {
            return bad("y_panels", "must be positive");
        }
        if !(self.y_truncation_sigmas > 0.0 && self.y_truncation_sigmas.is_finite()) {
            return bad("y_truncation_sigmas", "must be positive and finite");
        }
        if self.beta_grid_points < 64 {
            return bad("beta_grid_points", "must be at least 64");
        }
        if !(self.beta_floor > 0.0 && self.beta_floor.is_finite()) {
            return bad("beta_floor", "must be positive and finite");
        }
        if !(self.simpson_tol > 0.0 && self.simpson_tol.is_finite()) {
            return bad("simpson_tol", "must be positive and finite");
        }
        if !(self.fd_step > 0.0 && self.fd_step < 0.1) {
            return bad("fd_step", "must lie in (0, 0.1)");
        }
        Ok(())
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// Physicists' Gauss-Hermite nodes and weights for the weight e^{-x²}.
pub fn hermite_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            dp = nf * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// A fixed rule for E[f(Z)], Z ~ N(0, 1), rescaled onto any normal law.
#[derive(Debug, Clone)]
pub struct GaussianRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussianRule {
    pub fn hermite(n: usize) -> Self {
        let (x, w) = hermite_rule(n);
        let norm = PI.sqrt();
        Self {
            nodes: x.iter().map(|x| x * std::f64::consts::SQRT_2).collect(),
            weights: w.iter().map(|w| w / norm).collect(),
        }
    }

    pub fn composite_legendre(panels: usize, half_width: f64) -> Self {
        let (x, w) = legendre_rule(LEGENDRE_ORDER);
        let h = 2.0 * half_width / panels as f64;
        let mut nodes = Vec::with_capacity(panels * LEGENDRE_ORDER);
        let mut weights = Vec::with_capacity(panels * LEGENDRE_ORDER);
        for p in 0..panels {
            let mid = -half_width + (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(&w) {
                let z = mid + 0.5 * h * xi;
                nodes.push(z);
                weights.push(0.5 * h * wi * std_normal_pdf(z));
            }
        }
        Self { nodes, weights }
    }

    pub fn from_config(cfg: &QuadratureConfig) -> Self {
        match cfg.y_rule {
            YRule::Hermite => Self::hermite(cfg.hermite_nodes),
            YRule::Legendre => Self::composite_legendre(cfg.y_panels, cfg.y_truncation_sigmas),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Evaluation points for N(mean, variance) with their weights.
    pub fn points(&self, mean: f64, variance: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let sd = variance.sqrt();
        self.nodes.iter().zip(&self.weights).map(move |(z, w)| (mean + sd * z, *w))
    }

    /// ∫ f(y) N(y; mean, variance) dy.
    pub fn integrate<F>(&self, f: F, mean: f64, variance: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let mut acc = 0.0;
        for (y, w) in self.points(mean, variance) {
            let v = f(y);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { at: y });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// Same as [`integrate`](Self::integrate) for an expensive, fallible
    /// integrand; nodes may be evaluated concurrently, the sum is taken in
    /// node order.
    pub fn integrate_with<F>(&self, exec: Execution, f: F, mean: f64, variance: f64) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64> + Sync + Send,
    {
        let sd = variance.sqrt();
        let values = exec.map(&self.nodes, |z| f(mean + sd * z));
        let mut acc = 0.0;
        for ((v, w), z) in values.into_iter().zip(&self.weights).zip(&self.nodes) {
            let v = v?;
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { at: mean + sd * z });
            }
            acc += w * v;
        }
        Ok(acc)
    }
}

/// ∫ f(y) N(y; mean, variance) dy with the rule selected in `cfg`.
pub fn integrate_gaussian_weight<F>(f: F, mean: f64, variance: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    check_normal(mean, variance)?;
    GaussianRule::from_config(cfg).integrate(f, mean, variance)
}

/// Adaptive-Simpson fallback over mean ± `y_truncation_sigmas`·σ, for
/// integrands that are not smooth enough for the fixed rules.
pub fn integrate_gaussian_weight_adaptive<F>(
    f: F,
    mean: f64,
    variance: f64,
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    check_normal(mean, variance)?;
    let sd = variance.sqrt();
    let t = cfg.y_truncation_sigmas;
    // Integrate in standardized coordinates so the tolerance is scale-free.
    adaptive_simpson(
        |z| f(mean + sd * z) * std_normal_pdf(z),
        -t,
        t,
        cfg.simpson_tol,
        cfg.beta_grid_points,
    )
}

fn check_normal(mean: f64, variance: f64) -> Result<()> {
    if !mean.is_finite() {
        return Err(Error::NonFiniteParameter { name: "mean", value: mean });
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::NonPositiveVariance(variance));
    }
    Ok(())
}

/// Adaptive Simpson with Richardson correction, started from `panels` equal
/// sub-intervals. The absolute tolerance is shared out by width.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::InvalidInterval { lo: a, hi: b });
    }
    let eval = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { at: x })
        }
    };
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let panel_tol = tol / panels as f64;
    let mut total = 0.0;
    let mut fa = eval(a)?;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let hi = if p + 1 == panels { b } else { a + (p + 1) as f64 * h };
        let mid = 0.5 * (lo + hi);
        let fm = eval(mid)?;
        let fb = eval(hi)?;
        let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        let seg = Segment { a: lo, b: hi, fa, fm, fb, whole };
        total += refine(&eval, seg, panel_tol, MAX_SIMPSON_DEPTH)?;
        fa = fb;
    }
    Ok(total)
}

struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn refine<E>(eval: &E, s: Segment, tol: f64, depth: u32) -> Result<f64>
where
    E: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (s.a + s.b);
    let lm = 0.5 * (s.a + m);
    let rm = 0.5 * (m + s.b);
    let flm = eval(lm)?;
    let frm = eval(rm)?;
    let left = (m - s.a) / 6.0 * (s.fa + 4.0 * flm + s.fm);
    let right = (s.b - m) / 6.0 * (s.fm + 4.0 * frm + s.fb);
    let both = left + right;
    let delta = both - s.whole;
    // Rounding floor: never chase an error below what f64 can resolve.
    let floor = 64.0 * f64::EPSILON * both.abs();
    if delta.abs() <= 15.0 * tol.max(floor) {
        return Ok(both + delta / 15.0);
    }
    if depth == 0 || lm <= s.a || rm >= s.b {
        return Err(Error::ToleranceNotReached { lo: s.a, hi: s.b });
    }
    let l = refine(eval, Segment { a: s.a, b: m, fa: s.fa, fm: flm, fb: s.fm, whole: left }, tol / 2.0, depth - 1)?;
    let r = refine(eval, Segment { a: m, b: s.b, fa: s.fm, fm: frm, fb: s.fb, whole: right }, tol / 2.0, depth - 1)?;
    Ok(l + r)
}

/// ∫_{lo}^{hi} g(γ) dγ over the inverse-temperature axis.
///
/// When `lo == 0` the adaptive part starts at `cfg.beta_floor`. The sliver
/// [0, beta_floor] is added by one trapezoid panel if the caller supplies the
/// finite limit `g(0⁺)` in `at_zero`. Otherwise (g may blow up at 0) it is
/// the rectangle beta_floor·g(beta_floor), and the rest is integrated in
/// ln γ.
pub fn integrate_beta<G>(g: G, lo: f64, hi: f64, at_zero: Option<f64>, cfg: &QuadratureConfig) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    if lo > 0.0 {
        return adaptive_simpson(g, lo, hi, cfg.simpson_tol, cfg.beta_grid_points);
    }
    let floor = cfg.beta_floor;
    if hi <= floor {
        // Whole interval lies inside the sliver.
        let g_hi = g(hi);
        return match at_zero {
            Some(g0) if g_hi.is_finite() => Ok(0.5 * hi * (g0 + g_hi)),
            Some(_) => Err(Error::NonFiniteIntegrand { at: hi }),
            None if g_hi.is_finite() => Ok(hi * g_hi),
            None => Err(Error::NonFiniteIntegrand { at: hi }),
        };
    }
    let body = match at_zero {
        Some(_) => adaptive_simpson(&g, floor, hi, cfg.simpson_tol, cfg.beta_grid_points)?,
        // In t = ln γ a 1/γ blow-up becomes a constant.
        None => adaptive_simpson(
            |t| {
                let x = t.exp();
                x * g(x)
            },
            floor.ln(),
            hi.ln(),
            cfg.simpson_tol,
            cfg.beta_grid_points,
        )?,
    };
    let sliver = match at_zero {
        Some(g0) => {
            if !g0.is_finite() {
                return Err(Error::NonFiniteIntegrand { at: 0.0 });
            }
            0.5 * floor * (g0 + g(floor))
        }
        None => floor * g(floor),
    };
    Ok(sliver + body)
}

/// Symmetric difference quotient (h(at+step) − h(at−step)) / (2·step).
pub fn central_difference<H>(h: H, at: f64, step: f64) -> Result<f64>
where
    H: Fn(f64) -> f64,
{
    if !(step > 0.0 && at - step > 0.0) {
        return Err(Error::InvalidInterval { lo: at - step, hi: at + step });
    }
    let hi = h(at + step);
    if !hi.is_finite() {
        return Err(Error::NonFiniteValue { at: at + step });
    }
    let lo = h(at - step);
    if !lo.is_finite() {
        return Err(Error::NonFiniteValue { at: at - step });
    }
    Ok((hi - lo) / (2.0 * step))
}

/// Fallible variant of [`central_difference`] for functions that are
/// themselves computed by quadrature.
pub fn try_central_difference<H>(h: H, at: f64, step: f64) -> Result<f64>
where
    H: Fn(f64) -> Result<f64>,
{
    if !(step > 0.0 && at - step > 0.0) {
        return Err(Error::InvalidInterval { lo: at - step, hi: at + step });
    }
    let hi = h(at + step)?;
    let lo = h(at - step)?;
    if !hi.is_finite() {
        return Err(Error::NonFiniteValue { at: at + step });
    }
    if !lo.is_finite() {
        return Err(Error::NonFiniteValue { at: at - step });
    }
    Ok((hi - lo) / (2.0 * step))
}
