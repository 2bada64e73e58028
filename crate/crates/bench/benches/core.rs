use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use neurochaos::causality::{ccc, etc, granger, symbolize, CccConfig, GcConfig};
use neurochaos::chaosfex::{transform_instance, NeurochaosConfig, Normalization};
use neurochaos::dynamics::{generate_coupled_ar_pair, generate_coupled_map_pair, CoupledArConfig, CoupledMapConfig};
use neurochaos::mlp::{MlpArchitecture, MlpModel};

fn chaosfex(c: &mut Criterion) {
    let pair = generate_coupled_map_pair(&CoupledMapConfig::skew_tent(0.3, 1)).unwrap();
    let x = Normalization::PerInstance.apply(&pair.master).unwrap();
    let cfg = NeurochaosConfig::default();
    c.bench_function("chaosfex_transform_2000", |b| {
        b.iter(|| transform_instance(black_box(&x), &cfg).unwrap())
    });
}

fn complexity(c: &mut Criterion) {
    let pair = generate_coupled_map_pair(&CoupledMapConfig::skew_tent(0.3, 2)).unwrap();
    let seq = symbolize(&pair.master[..500], 4).unwrap();
    c.bench_function("etc_500_symbols", |b| b.iter(|| etc(black_box(&seq)).unwrap()));
    let cfg = CccConfig::default();
    c.bench_function("ccc_2000_raw", |b| {
        b.iter(|| ccc(black_box(&pair.master), black_box(&pair.slave), &cfg).unwrap())
    });
}

fn granger_bench(c: &mut Criterion) {
    let pair = generate_coupled_ar_pair(&CoupledArConfig::standard(0.4, 3)).unwrap();
    let cfg = GcConfig::default();
    c.bench_function("granger_aic30_2000", |b| {
        b.iter(|| granger(black_box(&pair.master), black_box(&pair.slave), &cfg).unwrap())
    });
}

fn mlp(c: &mut Criterion) {
    let arch = MlpArchitecture::five_layer(2000, 2);
    let model = MlpModel::<f32>::new(arch, 0).unwrap();
    let x: Vec<f32> = (0..2000).map(|i| (i as f32 * 0.37).sin().abs()).collect();
    c.bench_function("mlp_forward_five_layer", |b| b.iter(|| model.forward(black_box(&x)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = chaosfex, complexity, granger_bench, mlp
}
criterion_main!(benches);
