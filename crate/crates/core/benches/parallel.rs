//! Sequential versus rayon execution of the two embarrassingly parallel
//! workloads: curve sweeps and multi-start searches.

use criterion::{criterion_group, criterion_main, Criterion};
use qrate::capacity::holevo_capacity;
use qrate::optim::SearchConfig;
use qrate::parallel::Execution;
use qrate::qcore::channel::{standard_channel, StandardChannel};
use qrate::qcore::DensityMatrix;
use qrate::rdsolve::{rd_curve, CurveMode, Flavor, SolverConfig};

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn curve(c: &mut Criterion) {
    let rho = DensityMatrix::diagonal(&[0.8, 0.2]).unwrap();
    let grid = CurveMode::linspace(0.0, 0.7, 16);
    let mut g = c.benchmark_group("rd_curve_16");
    for (name, execution) in modes() {
        let cfg = SolverConfig { execution, ..SolverConfig::default() };
        g.bench_function(name, |b| b.iter(|| rd_curve(&rho, &grid, Flavor::Eac, &cfg).unwrap()));
    }
    g.finish();
}

fn multistart(c: &mut Criterion) {
    let n = standard_channel(&StandardChannel::AmplitudeDamping { gamma: 0.3 }).unwrap();
    let mut g = c.benchmark_group("holevo_32_restarts");
    g.sample_size(10);
    for (name, execution) in modes() {
        let cfg = SearchConfig { execution, ..SearchConfig::default() };
        g.bench_function(name, |b| b.iter(|| holevo_capacity(&n, &cfg).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, curve, multistart);
criterion_main!(benches);
