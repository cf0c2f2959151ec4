//! Enumeration-heavy kernels under the rayon pool and under the sequential build.
//!
//! `cargo bench -p ffanalytica` measures the rayon core at one worker and at
//! every available core. `cargo bench -p ffanalytica --no-default-features`
//! measures the sequential fallback; its ids carry the `sequential` label so
//! criterion keeps both sets of results side by side.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ffanalytica::analytics::{log_correlation, mr_variance, Context, VarianceMode};
use ffanalytica::gf::FieldSpec;
use ffanalytica::lfun::{sweep, SweepConfig};
use ffanalytica::multfn::MultFn;
use ffanalytica::par;
use ffanalytica::poly::{FactorSieve, Poly};

fn build() -> &'static str {
    if cfg!(feature = "parallel") {
        "rayon"
    } else {
        "sequential"
    }
}

fn workers() -> Vec<usize> {
    let all = std::thread::available_parallelism().map_or(1, |n| n.get());
    if cfg!(feature = "parallel") && all > 1 {
        vec![1, all]
    } else {
        vec![1]
    }
}

fn bench_kernel(c: &mut Criterion, name: &str, run: impl Fn() + Send + Sync) {
    let mut g = c.benchmark_group(name);
    g.sample_size(10);
    for w in workers() {
        g.bench_function(BenchmarkId::new(build(), format!("{w}-threads")), |b| par::with_threads(w, || b.iter(&run)));
    }
    g.finish();
}

fn kernels(c: &mut Criterion) {
    let f2 = FieldSpec::new(2).unwrap();
    let f3 = FieldSpec::new(3).unwrap();

    bench_kernel(c, "sieve_q2_deg18", || {
        black_box(FactorSieve::new(&f2, 18).unwrap());
    });

    let ctx = Context::new(&f2).unwrap();
    let mu = MultFn::moebius();
    ctx.table(&mu, 18).unwrap();
    bench_kernel(c, "mr_variance_mu_q2_n18_h6", || {
        black_box(mr_variance(&ctx, &mu, 18, 6, &VarianceMode::LongMean).unwrap());
    });

    bench_kernel(c, "chowla_mu_q2_n18", || {
        black_box(log_correlation(&ctx, &mu, &mu, &Poly::one(), 18).unwrap());
    });

    let cfg = SweepConfig { cond_max: 5, ..SweepConfig::default() };
    bench_kernel(c, "lfun_sweep_q3_cond5", || {
        black_box(sweep(&f3, &cfg).unwrap());
    });
}

criterion_group!(benches, kernels);
criterion_main!(benches);
