use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use psvf::{
    hausdorff_polylines, make_canonical, normalize, rho, sample_profile, sft_matrix,
    sigma_equivalence_check, synthesize, Engine, FamilyKind, Pk, Point, RealWindow, Tolerances,
};

fn bench_hausdorff(c: &mut Criterion) {
    let a: Vec<Point> = (0..512)
        .map(|i| {
            let t = i as f64 / 511.0 * std::f64::consts::PI;
            Point::new(t.cos(), t.sin())
        })
        .collect();
    let b: Vec<Point> = (0..512)
        .map(|i| Point::new(-1.0 + 2.0 * i as f64 / 511.0, 0.1))
        .collect();
    c.bench_function("hausdorff_polylines_512", |bench| {
        bench.iter(|| hausdorff_polylines(&a, &b))
    });
}

fn bench_branch_enumeration(c: &mut Criterion) {
    let engine = Engine::new(FamilyKind::FiniteK(3));
    c.bench_function("enumerate_branches_k3_h4", |bench| {
        bench.iter(|| engine.enumerate_branches(Point::new(-0.5, 0.0), 4.0, 256))
    });
}

fn bench_rho(c: &mut Criterion) {
    let engine = Engine::new(FamilyKind::FiniteK(3));
    let tree = engine.enumerate_branches(Point::new(-0.5, 0.0), 6.0, 128);
    let a = normalize(FamilyKind::FiniteK(3), &tree.leaves[0]);
    let b = normalize(FamilyKind::FiniteK(3), &tree.leaves[tree.leaves.len() - 1]);
    c.bench_function("rho_chain_n4", |bench| {
        bench.iter(|| rho(black_box(&a), black_box(&b), 4, 64))
    });
}

fn bench_sft_matrix(c: &mut Criterion) {
    c.bench_function("sft_matrix_k4", |bench| bench.iter(|| sft_matrix(4)));
}

fn bench_bean_synthesis(c: &mut Criterion) {
    let values = vec![0.5, 1.0, 0.25, 0.75, 0.5, 0.9, 0.1, 1.0];
    c.bench_function("bean_synthesize_8", |bench| {
        bench.iter_batched(
            || RealWindow::new(0, values.clone()).unwrap(),
            |w| synthesize(&w).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_equivalence(c: &mut Criterion) {
    let fam = make_canonical(FamilyKind::FiniteK(2));
    let p = Pk::new(2);
    let sample = sample_profile(|x| p.value(x), p.r0(), p.r1(), 800);
    let tol = Tolerances::default();
    c.bench_function("sigma_equivalence_k2_self", |bench| {
        bench.iter(|| sigma_equivalence_check(&fam.field, &sample, &fam.field, &sample, &tol))
    });
}

criterion_group!(
    benches,
    bench_hausdorff,
    bench_branch_enumeration,
    bench_rho,
    bench_sft_matrix,
    bench_bean_synthesis,
    bench_equivalence
);
criterion_main!(benches);
