use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use twistcohom::foliation::BasicTwist;
use twistcohom::identities::{dirac_square, weitzenbock};
use twistcohom_bench::{cat_map, twisted_torus};

fn harmonic_dims(c: &mut Criterion) {
    let mut group = c.benchmark_group("torus_harmonic_dims");
    for (dim, cutoff) in [(2, 4), (2, 8), (3, 3)] {
        let (t, theta) = twisted_torus(dim, cutoff, false);
        group.bench_with_input(BenchmarkId::new(format!("T{dim}"), cutoff), &cutoff, |b, _| {
            b.iter(|| t.harmonic_summary(&theta).unwrap())
        });
    }
    group.finish();
}

fn identities(c: &mut Criterion) {
    let (t, theta) = twisted_torus(2, 3, true);
    let calc = t.calculus(&theta).unwrap();
    c.bench_function("weitzenbock_T2_potential", |b| b.iter(|| weitzenbock(&calc, 3)));
    let m = cat_map(3).calculus(&BasicTwist::new(0.3)).unwrap();
    c.bench_function("dirac_square_suspension", |b| b.iter(|| dirac_square(&m, 3)));
}

criterion_group!(benches, harmonic_dims, identities);
criterion_main!(benches);
