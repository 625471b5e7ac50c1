use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gapped_ent::channels::DwhChannel;
use gapped_ent::fcs::{builtin_spec, rho_chain};
use gapped_ent::gapped::{build_model, diagonalize, gaussian_filter, region_split, gs_projector_approx, GsOptions, ModelKind};
use gapped_ent::qlinalg::{eig_hermitian, partial_trace, random, TensorShape};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn linalg(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut g = c.benchmark_group("eig_hermitian");
    for n in [64, 256] {
        let h = random::random_hermitian(&mut rng, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| b.iter(|| eig_hermitian(black_box(h.as_ref())).unwrap()));
    }
    g.finish();
    let shape = TensorShape::uniform(2, 8).unwrap();
    let rho = random::random_density(&mut rng, 256, 256);
    c.bench_function("partial_trace 2^8 keep 4", |b| {
        b.iter(|| partial_trace(black_box(rho.as_ref()), &shape, &[0, 1, 2, 3]).unwrap())
    });
}

fn channels(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let ch = DwhChannel::new(0.5, 3).unwrap();
    let psi = random::gaussian_state(&mut rng, &TensorShape::uniform(3, 2).unwrap());
    c.bench_function("tensor norm closed form d=3", |b| b.iter(|| ch.tensor_output_2norm_sq(black_box(&psi)).unwrap()));
    c.bench_function("tensor norm direct d=3", |b| b.iter(|| ch.tensor_output_2norm_sq_direct(black_box(&psi)).unwrap()));
}

fn fcs(c: &mut Criterion) {
    let spec = builtin_spec("aklt").unwrap();
    c.bench_function("aklt rho_chain n=5", |b| b.iter(|| rho_chain(black_box(&spec), 5).unwrap()));
}

fn gapped(c: &mut Criterion) {
    let model = build_model(&ModelKind::Tfim { h: 2.0 }, 8).unwrap();
    c.bench_function("diagonalize tfim n=8", |b| b.iter(|| diagonalize(black_box(&model)).unwrap()));
    let spec = diagonalize(&model).unwrap();
    let h = model.hamiltonian().unwrap();
    c.bench_function("gaussian_filter n=8", |b| b.iter(|| gaussian_filter(&spec, black_box(h.as_ref()), 1.0).unwrap()));
    let split = region_split(8, 0, 3, 1).unwrap();
    let opts = GsOptions::paper(&model, &spec, &split).unwrap();
    let mut g = c.benchmark_group("gs_projector_approx");
    g.sample_size(10);
    g.bench_function("tfim n=8 l=1", |b| b.iter(|| gs_projector_approx(&model, &spec, &split, black_box(&opts)).unwrap()));
    g.finish();
}

criterion_group!(benches, linalg, channels, fcs, gapped);
criterion_main!(benches);
