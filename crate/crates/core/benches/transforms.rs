use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vilenkin::counterexample::{divergence_series_terms, CounterexampleSpec, Phi};
use vilenkin::{forward_transform, DiscreteFunction, Execution, GroupStructure};

fn random(gs: &GroupStructure) -> DiscreteFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    DiscreteFunction::from_fn(gs, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("forward_transform");
    for (label, gs) in [
        ("walsh-18", GroupStructure::walsh(18).unwrap()),
        ("mixed-2-3-4", GroupStructure::periodic(&[2, 3, 4], 12).unwrap()),
    ] {
        let f = random(&gs);
        for exec in [Execution::Sequential, Execution::Parallel] {
            let gs = gs.clone().with_execution(exec);
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), label), &f, |b, f| {
                b.iter(|| forward_transform(&gs, black_box(f)).unwrap())
            });
        }
    }
    group.finish();
}

fn riesz_probes(c: &mut Criterion) {
    let mut group = c.benchmark_group("riesz_probes");
    group.sample_size(10);
    let spec = CounterexampleSpec::from_alphas(Phi::log(), 0.25, vec![2, 5]).unwrap();
    for exec in [Execution::Sequential, Execution::Parallel] {
        let gs = GroupStructure::walsh(spec.required_depth()).unwrap().with_execution(exec);
        group.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| divergence_series_terms(&gs, &spec, gs.size()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, transforms, riesz_probes);
criterion_main!(benches);
