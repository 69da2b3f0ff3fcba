use criterion::{criterion_group, criterion_main, Criterion};
use twistcohom::foliation::{BasicTwist, LieAlgebraModel};
use twistcohom::simplicial::{bundled_cocycle, bundled_complex, twisted_betti};
use twistcohom::EdgeCocycle;
use twistcohom_bench::cat_map;

fn simplicial(c: &mut Criterion) {
    let torus = bundled_complex("torus7").unwrap();
    let ln2 = bundled_cocycle("torus7_ln2").unwrap();
    c.bench_function("simplicial_torus7_ln2", |b| {
        b.iter(|| twisted_betti(&torus, &ln2, 0.0).unwrap())
    });
    let rp3 = bundled_complex("rp3_11").unwrap();
    let zero = EdgeCocycle::zero(&rp3);
    c.bench_function("simplicial_rp3", |b| {
        b.iter(|| twisted_betti(&rp3, &zero, 0.0).unwrap())
    });
}

fn foliation(c: &mut Criterion) {
    let m = cat_map(8);
    c.bench_function("suspension_betti_K8", |b| {
        b.iter(|| m.basic_twisted_betti(&BasicTwist::new(m.leaf_rate), 1e-8).unwrap())
    });
    let grid = m.scan_grid();
    c.bench_function("suspension_top_scan", |b| {
        b.iter(|| m.top_degree_scan(&grid, 1e-8).unwrap())
    });
    let so3 = LieAlgebraModel::so3();
    c.bench_function("o3_curvature", |b| b.iter(|| so3.biinvariant_curvature().unwrap()));
}

criterion_group!(benches, simplicial, foliation);
criterion_main!(benches);
