use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use nc_spectrum::algebra::MultiMatrixAlgebra;
use nc_spectrum::gen;
use nc_spectrum::ktheory::{eta, verify_naturality_square, SubdiagramSpec};
use nc_spectrum::par::{set_exec, Exec};

fn modes(c: &mut Criterion) {
    let spec = SubdiagramSpec::default();
    let a = MultiMatrixAlgebra::new(vec![2, 3]).unwrap();
    let phi = gen::random_unital_hom(&mut gen::rng(17), 6);

    let mut group = c.benchmark_group("eta [2,3] m=2");
    group.sample_size(10);
    for mode in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &mode, |b, &mode| {
            set_exec(mode);
            b.iter(|| eta(black_box(&a), &spec, 2).unwrap());
        });
    }
    group.finish();

    let mut group = c.benchmark_group("naturality square m=2");
    group.sample_size(10);
    for mode in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &mode, |b, &mode| {
            set_exec(mode);
            b.iter(|| verify_naturality_square(black_box(&phi), &spec, 2).unwrap());
        });
    }
    group.finish();
    set_exec(Exec::Parallel);
}

criterion_group!(benches, modes);
criterion_main!(benches);
