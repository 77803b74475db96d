//! The invariant suite behind `thermomi verify`.

use std::fmt;

use thermomi::boltzmann::posterior;
use thermomi::estimation::{mi_gsv, mmse};
use thermomi::exec::map_ordered;
use thermomi::reference::mc_mutual_information;
use thermomi::thermo::mi_thermo_generalized;
use thermomi::{EnergyModel, Execution, InputDistribution, QuadratureConfig};

use crate::config::Validated;
use crate::report::SweepRecord;
use crate::sweep::{evaluate, with_jobs, Routes, IDENTITY_Y};
use crate::CliError;

pub const GAUGE_SHIFT: f64 = 7.3;
pub const IDENTITY_TOL: f64 = 1e-9;
pub const GAUGE_TOL: f64 = 1e-10;
pub const ROUTE_TOL: f64 = 1e-4;
pub const CLOSED_FORM_TOL: f64 = 1e-4;
pub const GSV_TOL: f64 = 1e-5;
pub const CLASSICAL_TOL: f64 = 1e-4;
/// Monte-Carlo agreement is judged in standard errors.
pub const ORACLE_SIGMAS: f64 = 4.0;
/// Slack for monotonicity and the mmse upper bound.
const ORDER_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "skip",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    /// Largest violation measure seen (NaN when skipped).
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn bounded(name: &'static str, tolerance: f64, worst: Option<(f64, f64)>) -> Self {
        match worst {
            None => Self { name, status: Status::Skip, worst: f64::NAN, tolerance, detail: "not applicable".into() },
            Some((w, beta)) => Self {
                name,
                status: if w < tolerance { Status::Pass } else { Status::Fail },
                worst: w,
                tolerance,
                detail: format!("worst at beta = {beta}"),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verification {
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name).collect()
    }

    pub fn table(&self) -> String {
        let mut s = format!("{:<16} {:<6} {:>12} {:>10}  {}\n", "check", "status", "worst", "tolerance", "detail");
        for c in &self.checks {
            s += &format!("{:<16} {:<6} {:>12.3e} {:>10.1e}  {}\n", c.name, c.status, c.worst, c.tolerance, c.detail);
        }
        s
    }
}

struct PointResult {
    record: SweepRecord,
    gauge_delta: f64,
}

/// Largest change of any observable when every energy is shifted by
/// [`GAUGE_SHIFT`].
fn gauge_delta(prior: &InputDistribution, beta: f64, record: &SweepRecord, cfg: &QuadratureConfig) -> thermomi::Result<f64> {
    let plain = EnergyModel::new(prior);
    let shifted = plain.with_offset(GAUGE_SHIFT);
    let mut worst: f64 = 0.0;
    let mut note = |a: f64, b: f64| worst = worst.max((a - b).abs());
    for y in IDENTITY_Y {
        let p0 = posterior(plain, y, beta)?;
        let p1 = posterior(shifted, y, beta)?;
        note(p0.mean(), p1.mean());
        note(p0.variance(), p1.variance());
        if let (Some(w0), Some(w1)) = (p0.weights(), p1.weights()) {
            for (a, b) in w0.iter().zip(w1) {
                note(a.prob, b.prob);
            }
        }
    }
    if let Some(g) = record.mi_thermo_generalized {
        note(g, mi_thermo_generalized(shifted, beta, cfg)?.value_nats);
    }
    if let Some(g) = record.mi_gsv {
        note(g, mi_gsv(shifted, beta, cfg)?.value_nats);
    }
    note(record.mmse, mmse(shifted, beta, cfg)?);
    Ok(worst)
}

fn worst_of(points: &[PointResult], f: impl Fn(&PointResult) -> Option<f64>) -> Option<(f64, f64)> {
    points
        .iter()
        .filter_map(|p| f(p).map(|v| (v, p.record.beta)))
        .fold(None, |acc: Option<(f64, f64)>, (v, b)| match acc {
            Some((w, _)) if w.is_nan() || v <= w => acc,
            _ => Some((v, b)),
        })
}

/// Largest drop between consecutive values; zero for a nondecreasing run.
fn largest_drop(points: &[PointResult], f: impl Fn(&SweepRecord) -> Option<f64>) -> Option<(f64, f64)> {
    let vals: Vec<(f64, f64)> = points.iter().filter_map(|p| f(&p.record).map(|v| (v, p.record.beta))).collect();
    if vals.is_empty() {
        return None;
    }
    let mut worst = (0.0, vals[0].1);
    for w in vals.windows(2) {
        let drop = w[0].0 - w[1].0;
        if drop > worst.0 {
            worst = (drop, w[1].1);
        }
    }
    Some(worst)
}

pub fn run_verify(cfg: &Validated, jobs: Option<usize>) -> Result<Verification, CliError> {
    let prior = &cfg.prior;
    let quad = cfg.raw.quadrature.clone().with_execution(Execution::Sequential);
    let points = with_jobs(jobs, |exec| {
        map_ordered(exec, &cfg.betas, |&b| -> thermomi::Result<PointResult> {
            let record = evaluate(prior, b, Routes::ALL, &quad, false)?;
            let gauge_delta = gauge_delta(prior, b, &record, &quad)?;
            Ok(PointResult { record, gauge_delta })
        })
    })?;
    let points = points
        .into_iter()
        .zip(&cfg.betas)
        .map(|(p, b)| p.map_err(|e| CliError::Numeric(format!("beta = {b}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;

    let mut checks = vec![
        Check::bounded("identity", IDENTITY_TOL, worst_of(&points, |p| Some(p.record.identity_residual_max))),
        Check::bounded("gauge", GAUGE_TOL, worst_of(&points, |p| Some(p.gauge_delta))),
        Check::bounded(
            "route_agreement",
            ROUTE_TOL,
            worst_of(&points, |p| Some((p.record.mi_thermo_generalized? - p.record.mi_gsv?).abs())),
        ),
        Check::bounded(
            "closed_form",
            CLOSED_FORM_TOL,
            worst_of(&points, |p| {
                let r = &p.record;
                let c = r.mi_closed_form?;
                Some((r.mi_thermo_generalized? - c).abs().max((r.mi_gsv? - c).abs()))
            }),
        ),
        Check::bounded("gsv_check", GSV_TOL, worst_of(&points, |p| p.record.gsv_residual.map(f64::abs))),
    ];

    let drop_gen = largest_drop(&points, |r| r.mi_thermo_generalized);
    let drop_gsv = largest_drop(&points, |r| r.mi_gsv);
    let drop = match (drop_gen, drop_gsv) {
        (Some(a), Some(b)) => Some(if a.0 >= b.0 { a } else { b }),
        (a, b) => a.or(b),
    };
    let mut mono = Check::bounded("monotonic", ORDER_SLACK, drop);
    if mono.status == Status::Pass {
        mono.detail = "mutual information nondecreasing in beta".into();
    }
    checks.push(mono);

    let var = prior.variance();
    let mut bounds = Check::bounded(
        "mmse_bounds",
        ORDER_SLACK,
        worst_of(&points, |p| Some((-p.record.mmse).max(p.record.mmse - var * (1.0 + ORDER_SLACK)).max(0.0))),
    );
    bounds.detail = format!("0 <= mmse <= {var}; {}", bounds.detail);
    checks.push(bounds);

    checks.push(oracle_check(cfg, &points, jobs)?);

    let classical = cfg.raw.strict_classical.then(|| {
        worst_of(&points, |p| Some((p.record.mi_thermo_classical? - p.record.mi_thermo_generalized?).abs()))
    });
    checks.push(match classical {
        Some(w) => Check::bounded("classical", CLASSICAL_TOL, w),
        None => Check {
            name: "classical",
            status: Status::Skip,
            worst: f64::NAN,
            tolerance: CLASSICAL_TOL,
            detail: "set strict_classical to require agreement".into(),
        },
    });

    Ok(Verification { checks })
}

/// Monte-Carlo estimate at the middle grid point against the closed form,
/// or the generalized route where none exists.
fn oracle_check(cfg: &Validated, points: &[PointResult], jobs: Option<usize>) -> Result<Check, CliError> {
    let mid = &points[points.len() / 2].record;
    let target = match mid.mi_closed_form.or(mid.mi_thermo_generalized) {
        Some(t) => t,
        None => return Ok(Check::bounded("oracle", ORACLE_SIGMAS, None)),
    };
    let est = with_jobs(jobs, |exec| {
        let oracle = cfg.raw.oracle.clone();
        mc_mutual_information(&cfg.prior, mid.beta, &thermomi::OracleConfig { execution: exec, ..oracle })
    })?
    .map_err(|e| CliError::Numeric(format!("oracle at beta = {}: {e}", mid.beta)))?;
    let sigmas = (est.estimate - target).abs() / est.stderr;
    Ok(Check {
        name: "oracle",
        status: if sigmas <= ORACLE_SIGMAS { Status::Pass } else { Status::Fail },
        worst: sigmas,
        tolerance: ORACLE_SIGMAS,
        detail: format!(
            "beta = {}: {} ± {} ({} samples, seed {}) vs {target}",
            mid.beta, est.estimate, est.stderr, est.samples, est.seed
        ),
    })
}
