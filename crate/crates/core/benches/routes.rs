//! Sequential vs data-parallel evaluation of the main workloads.
//!
//! Build without default features to check the fallback path: both rows then
//! run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use thermomi::estimation::mi_gsv;
use thermomi::exec::map_ordered;
use thermomi::reference::mc_mutual_information;
use thermomi::thermo::mi_thermo_generalized;
use thermomi::{Execution, InputDistribution, OracleConfig, QuadratureConfig};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn thermo_route(c: &mut Criterion) {
    let mut group = c.benchmark_group("mi_thermo_generalized");
    group.sample_size(10);
    for (prior_name, prior) in [
        ("gaussian", InputDistribution::standard_gaussian()),
        ("bernoulli", InputDistribution::bernoulli_half()),
    ] {
        for (mode, exec) in MODES {
            let cfg = QuadratureConfig::default().with_execution(exec);
            group.bench_with_input(BenchmarkId::new(mode, prior_name), &cfg, |b, cfg| {
                b.iter(|| mi_thermo_generalized(&prior, black_box(2.0), cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc_mutual_information");
    group.sample_size(10);
    let prior = InputDistribution::bernoulli_half();
    for (mode, exec) in MODES {
        let cfg = OracleConfig { mc_samples: 1_000_000, execution: exec, ..OracleConfig::default() };
        group.bench_with_input(BenchmarkId::new(mode, "1e6"), &cfg, |b, cfg| {
            b.iter(|| mc_mutual_information(&prior, black_box(1.0), cfg).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep_16");
    group.sample_size(10);
    let prior = InputDistribution::bernoulli_half();
    let betas: Vec<f64> = (0..16).map(|i| 0.1 * 100f64.powf(i as f64 / 15.0)).collect();
    let cfg = QuadratureConfig::default().with_execution(Execution::Sequential);
    for (mode, exec) in MODES {
        group.bench_function(mode, |b| {
            b.iter(|| {
                map_ordered(exec, &betas, |&beta| {
                    let t = mi_thermo_generalized(&prior, beta, &cfg).unwrap().value_nats;
                    let g = mi_gsv(&prior, beta, &cfg).unwrap().value_nats;
                    t - g
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, thermo_route, monte_carlo, sweep);
criterion_main!(benches);
