//! Parallel against sequential evaluation of curvatures and the assembled Jacobian.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hexcurv::conformal::Family;
use hexcurv::curvature::evaluate;
use hexcurv::exec::Exec;
use hexcurv::sampling::{self, rng};
use std::hint::black_box;

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate");
    for n in [50, 200, 800] {
        let mut r = rng(1, n as u64);
        let tri = sampling::random_mesh(n, &mut r);
        let spec = sampling::random_spec(Family::A1, &tri, true, &mut r);
        let u = sampling::admissible_point(&spec, &tri, 10, &mut r).expect("admissible point");
        let f = spec.f_from_u(&u).expect("factors");
        for (name, exec) in [
            ("sequential", Exec::Sequential),
            ("parallel", Exec::Parallel),
        ] {
            group.bench_with_input(
                BenchmarkId::new(format!("{name}/curvature"), n),
                &f,
                |b, f| {
                    b.iter(|| evaluate(&spec, &tri, black_box(f), false, exec).expect("evaluate"))
                },
            );
            group.bench_with_input(
                BenchmarkId::new(format!("{name}/jacobian"), n),
                &f,
                |b, f| {
                    b.iter(|| evaluate(&spec, &tri, black_box(f), true, exec).expect("evaluate"))
                },
            );
        }
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
