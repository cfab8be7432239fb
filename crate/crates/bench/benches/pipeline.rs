//! Criterion benchmarks for the hot numeric paths: statevector gates,
//! parameter-shift gradients, BPTT, and the correlation coefficient.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qweather_core::linalg::Mat;
use qweather_core::preprocess::pearson_dense;
use qweather_core::qnn::{self, AnsatzSpec, Entangler, QnnParams};
use qweather_core::qsim::{zero_state, GateOp};
use qweather_core::rnn::{rnn_grad_into, RnnParams, RnnSpec};

fn bench_statevector(c: &mut Criterion) {
    let mut group = c.benchmark_group("statevector");
    for n in [6usize, 8, 12] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gates: Vec<GateOp> = (0..n)
            .map(|q| GateOp::Rot {
                qubit: q,
                alpha: rng.gen_range(0.0..std::f64::consts::TAU),
                beta: rng.gen_range(0.0..std::f64::consts::TAU),
                gamma: rng.gen_range(0.0..std::f64::consts::TAU),
            })
            .chain((0..n).map(|q| GateOp::Cnot {
                control: q,
                target: (q + 1) % n,
            }))
            .collect();
        group.bench_function(format!("layer_n{n}"), |b| {
            b.iter(|| {
                let mut state = zero_state(n).unwrap();
                state.apply_all(black_box(&gates)).unwrap();
                black_box(state.expval_z(0).unwrap())
            })
        });
    }
    group.finish();
}

fn bench_qnn_gradient(c: &mut Criterion) {
    let mut group = c.benchmark_group("qnn_gradient");
    group.sample_size(20);
    for (label, entangler, depth, n) in [
        ("basic_d3_n6", Entangler::Basic, 3usize, 6usize),
        ("strong_d3_n8", Entangler::Strong, 3, 8),
    ] {
        let spec = AnsatzSpec::new(n, depth, entangler).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let params = QnnParams::init(&spec, &mut rng);
        let features: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        group.bench_function(label, |b| {
            b.iter(|| qnn::gradient(black_box(&spec), black_box(&params), black_box(&features)))
        });
    }
    group.finish();
}

fn bench_rnn_bptt(c: &mut Criterion) {
    let mut group = c.benchmark_group("rnn_bptt");
    group.sample_size(20);
    let spec = RnnSpec {
        features: 6,
        hidden: 256,
        window: 28,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let params = RnnParams::init(&spec, &mut rng);
    let rows: Vec<Vec<f64>> = (0..28)
        .map(|_| (0..6).map(|_| rng.gen_range(-1.5..1.5)).collect())
        .collect();
    let window = Mat::from_rows(&rows);
    let mut grad = vec![0.0; RnnParams::param_count(&spec)];
    group.bench_function("h256_w28", |b| {
        b.iter(|| {
            grad.fill(0.0);
            black_box(rnn_grad_into(&params, window.view(), 0.5, &mut grad).unwrap())
        })
    });
    group.finish();
}

fn bench_pearson(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x: Vec<f64> = (0..366).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|v| v * 0.7 + rng.gen_range(-1.0..1.0))
        .collect();
    c.bench_function("pearson_366", |b| {
        b.iter(|| pearson_dense(black_box(&x), black_box(&y)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_statevector,
    bench_qnn_gradient,
    bench_rnn_bptt,
    bench_pearson
);
criterion_main!(benches);
