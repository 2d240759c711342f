use criterion::{black_box, criterion_group, criterion_main, Criterion};
use stacky_core::asymptotics::{phi_exact, product_count, HeightMultiset};
use stacky_core::elliptic::compare_with_tate;
use stacky_core::global::{as_count_table, HeightKind};
use stacky_core::local::{torsor_count, AbelianPGroup};
use stacky_core::FiniteField;

fn local(c: &mut Criterion) {
    let f = FiniteField::new(3, 2).unwrap();
    let g = AbelianPGroup::new(3, &[2, 1]).unwrap();
    c.bench_function("torsor_count z9z3 F9 n<=60", |b| {
        b.iter(|| {
            (0..=60)
                .map(|n| torsor_count(&g, &f, black_box(n)).unwrap())
                .collect::<Vec<_>>()
        })
    });
}

fn global(c: &mut Criterion) {
    let f = FiniteField::new(3, 1).unwrap();
    c.bench_function("as_count_table z3 F3 conductor 3^20", |b| {
        b.iter(|| as_count_table(&f, 1, HeightKind::Conductor, black_box(20), true).unwrap())
    });
    let f2 = FiniteField::new(2, 1).unwrap();
    c.bench_function("as_count_table z2z2 F2 discriminant 2^16", |b| {
        b.iter(|| as_count_table(&f2, 2, HeightKind::Discriminant, black_box(16), true).unwrap())
    });
}

fn asymptotics(c: &mut Criterion) {
    let x = HeightMultiset::new((1..=100_000).map(|n| (n as f64, 1)).collect()).unwrap();
    c.bench_function("product_count range 1e5 at 1e6", |b| {
        b.iter(|| product_count(&x, &x, black_box(1e6)))
    });
    c.bench_function("phi_exact (3,4) at 1e8", |b| {
        b.iter(|| phi_exact(black_box(1e8), 3, 4).unwrap())
    });
}

fn elliptic(c: &mut Criterion) {
    let f = FiniteField::new(3, 1).unwrap();
    let mut g = c.benchmark_group("elliptic");
    g.sample_size(10);
    g.bench_function("compare_with_tate F3 x10", |b| {
        b.iter(|| compare_with_tate(&f, 10, black_box(7), 40).unwrap())
    });
    g.finish();
}

criterion_group!(benches, local, global, asymptotics, elliptic);
criterion_main!(benches);
