//! Per-β evaluation of every requested route.

use std::str::FromStr;
use std::time::Instant;

use thermomi::boltzmann::{internal_energy, log_partition, posterior_entropy};
use thermomi::estimation::{gsv_check, mi_gsv, mmse};
use thermomi::exec::map_ordered;
use thermomi::reference::closed_form_mi;
use thermomi::thermo::{mi_thermo_classical, mi_thermo_generalized};
use thermomi::{ChannelPoint, Execution, InputDistribution, QuadratureConfig};

use crate::config::Validated;
use crate::report::{ReportHeader, SweepRecord, SweepReport, TOOL_NAME};
use crate::CliError;

/// Observations at which log Z + βU − S is checked.
pub const IDENTITY_Y: [f64; 9] = [-4.0, -3.0, -2.0, -1.0, 0.0, 0.7, 1.5, 2.5, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Routes {
    pub thermo: bool,
    pub gsv: bool,
    pub classical: bool,
}

impl Routes {
    pub const ALL: Routes = Routes { thermo: true, gsv: true, classical: true };

    pub fn names(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.thermo {
            v.push("thermo".to_string());
        }
        if self.gsv {
            v.push("gsv".to_string());
        }
        if self.classical {
            v.push("classical".to_string());
        }
        v
    }
}

impl Default for Routes {
    fn default() -> Self {
        Self::ALL
    }
}

impl FromStr for Routes {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut r = Routes { thermo: false, gsv: false, classical: false };
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "thermo" => r.thermo = true,
                "gsv" => r.gsv = true,
                "classical" => r.classical = true,
                other => return Err(format!("unknown route `{other}` (expected thermo, gsv, classical)")),
            }
        }
        if r == (Routes { thermo: false, gsv: false, classical: false }) {
            return Err("no route selected".into());
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub routes: Routes,
    /// Worker threads for the β fan-out; `None` lets rayon decide, `Some(1)`
    /// runs everything on the calling thread.
    pub jobs: Option<usize>,
    pub timings: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { routes: Routes::ALL, jobs: None, timings: false }
    }
}

/// Runs `f` on a pool with `jobs` workers, or inline for a single job.
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce(Execution) -> R + Send) -> Result<R, CliError> {
    match jobs {
        Some(0) => Err(CliError::Config("--jobs: must be at least 1".into())),
        Some(1) => Ok(f(Execution::Sequential)),
        _ => {
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(n) = jobs {
                builder = builder.num_threads(n);
            }
            let pool = builder.build().map_err(|e| CliError::Numeric(format!("thread pool: {e}")))?;
            Ok(pool.install(|| f(Execution::Parallel)))
        }
    }
}

/// max over [`IDENTITY_Y`] of |log Z + βU − S|.
pub fn identity_residual_max(prior: &InputDistribution, beta: f64) -> thermomi::Result<f64> {
    let mut worst: f64 = 0.0;
    for y in IDENTITY_Y {
        let r = log_partition(prior, y, beta)? + beta * internal_energy(prior, y, beta)?
            - posterior_entropy(prior, y, beta)?;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

pub fn evaluate(
    prior: &InputDistribution,
    beta: f64,
    routes: Routes,
    cfg: &QuadratureConfig,
    timings: bool,
) -> thermomi::Result<SweepRecord> {
    let start = Instant::now();
    let point = ChannelPoint::positive(beta)?;
    let generalized = routes.thermo.then(|| mi_thermo_generalized(prior, beta, cfg)).transpose()?;
    let classical = routes.classical.then(|| mi_thermo_classical(prior, beta, cfg)).transpose()?;
    let gsv = routes.gsv.then(|| mi_gsv(prior, beta, cfg)).transpose()?;
    let gsv_residual = (routes.gsv && beta > cfg.fd_step)
        .then(|| gsv_check(prior, beta, cfg))
        .transpose()?
        .map(|c| c.residual);
    let closed = closed_form_mi(prior, beta, cfg).transpose()?;
    let mmse = mmse(prior, beta, cfg)?;
    let identity = identity_residual_max(prior, beta)?;
    let runtime_ms = timings.then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok(SweepRecord {
        beta,
        snr_db: point.snr_db(),
        mi_thermo_generalized: generalized.map(|r| r.value_nats),
        mi_thermo_classical: classical.map(|r| r.value_nats),
        mi_gsv: gsv.map(|r| r.value_nats),
        mi_closed_form: closed,
        mmse,
        gsv_residual,
        identity_residual_max: identity,
        runtime_ms,
    })
}

/// Evaluates the whole grid. Records come back in β order whatever the
/// number of workers.
pub fn run_sweep(cfg: &Validated, opts: SweepOptions) -> Result<SweepReport, CliError> {
    // Work items are the unit of parallelism; each runs its quadrature inline.
    let quad = cfg.raw.quadrature.clone().with_execution(Execution::Sequential);
    let results = with_jobs(opts.jobs, |exec| {
        map_ordered(exec, &cfg.betas, |&b| evaluate(&cfg.prior, b, opts.routes, &quad, opts.timings))
    })?;
    let mut records = Vec::with_capacity(results.len());
    for (beta, r) in cfg.betas.iter().zip(results) {
        records.push(r.map_err(|e| CliError::Numeric(format!("beta = {beta}: {e}")))?);
    }
    Ok(SweepReport {
        header: ReportHeader {
            tool: TOOL_NAME.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            prior: cfg.raw.prior.clone(),
            quadrature: cfg.raw.quadrature.clone(),
            oracle_seed: cfg.raw.oracle.rng_seed,
            routes: opts.routes.names(),
        },
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_parse() {
        assert_eq!("thermo,gsv,classical".parse::<Routes>().unwrap(), Routes::ALL);
        let r: Routes = "gsv".parse().unwrap();
        assert!(r.gsv && !r.thermo && !r.classical);
        assert!("thermo,bogus".parse::<Routes>().is_err());
        assert!("".parse::<Routes>().is_err());
    }

    #[test]
    fn identity_residual_is_tiny() {
        let r = identity_residual_max(&InputDistribution::bernoulli_half(), 2.3).unwrap();
        assert!(r < 1e-12, "{r}");
    }

    #[test]
    fn record_fields() {
        let prior = InputDistribution::standard_gaussian();
        let rec = evaluate(&prior, 1.0, Routes::ALL, &QuadratureConfig::default(), false).unwrap();
        let half_ln2 = 0.5 * 2f64.ln();
        assert_eq!(rec.snr_db, 0.0);
        assert!((rec.mi_thermo_generalized.unwrap() - half_ln2).abs() < 1e-4);
        assert!((rec.mi_gsv.unwrap() - half_ln2).abs() < 1e-5);
        assert_eq!(rec.mi_closed_form, Some(half_ln2));
        assert!((rec.mmse - 0.5).abs() < 1e-9);
        assert!(rec.gsv_residual.unwrap().abs() < 1e-3);
        assert!(rec.runtime_ms.is_none());
    }
}
