use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use oamp_core::denoisers::{Denoiser, DfDenoiser, Scale};
use oamp_core::ensembles::{sample_matrix, EnsembleSpec, OrthoKind};
use oamp_core::exec::{map_indexed, map_indexed_serial};
use oamp_core::linest::LeKind;
use oamp_core::model::{noise_variance_from_snr, LinearSystem, Prior};
use oamp_core::rng::{stream, Stage};
use oamp_core::solvers::{run_oamp, SolverOptions};

/// Final MSE of one OAMP-LMMSE trial on a partial DCT matrix.
fn trial(n: usize, t: usize) -> f64 {
    let prior = Prior::BernoulliGaussian { rho: 0.1 };
    let t = t as u64;
    let spec = EnsembleSpec::PartialOrthogonal { ortho: OrthoKind::Dct };
    let a = sample_matrix(&spec, n * 35 / 100, n, &mut stream(1, t, Stage::Matrix)).unwrap();
    let sigma2 = noise_variance_from_snr(&a, &prior, 50.0);
    let sys =
        LinearSystem::sample(&a, &prior, sigma2, &mut stream(1, t, Stage::Signal), &mut stream(1, t, Stage::Noise))
            .unwrap();
    let df = DfDenoiser { base: Denoiser::mmse(prior), scale: Scale::Optimal };
    let opts = SolverOptions { iterations: 20, early_exit: false, v2_init: 1.0, ..Default::default() };
    let tr = run_oamp(&sys, LeKind::Lmmse, &df, &Denoiser::mmse(prior), &opts).unwrap();
    tr.records.last().map_or(f64::NAN, |r| r.mse_out)
}

fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("monte_carlo_trials");
    g.sample_size(10);
    let trials = 16;
    for n in [1024, 4096] {
        g.bench_with_input(BenchmarkId::new("serial", n), &n, |b, &n| {
            b.iter(|| black_box(map_indexed_serial(trials, |t| trial(n, t))))
        });
        g.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| black_box(map_indexed(trials, |t| trial(n, t))))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
