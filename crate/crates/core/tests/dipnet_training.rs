use dipoed::dipnet::{train, Activation, Dataset, DipNet, DipNetConfig, TrainConfig};
use dipoed::rng::{stream_rng, Stream};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

fn orthonormal(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = stream_rng(seed, Stream::Init, 99);
    let a = DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0));
    a.qr().q().columns(0, cols).into_owned()
}

/// Outputs `Φ tanh(A Vᵀm) + c`, realizable with the given bases.
fn dataset(v: &DMatrix<f64>, phi: &DMatrix<f64>, samples: usize) -> Dataset {
    let mut rng = stream_rng(1, Stream::Data, 0);
    let r = v.ncols();
    let a = DMatrix::from_fn(r, r, |_, _| rng.random_range(-1.5..1.5));
    let c = nalgebra::DVector::from_fn(phi.nrows(), |i, _| 0.1 * i as f64);
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    for _ in 0..samples {
        let m: Vec<f64> = (0..v.nrows()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let z = v.transpose() * nalgebra::DVector::from_column_slice(&m);
        let y = phi * (&a * z).map(f64::tanh) + &c;
        inputs.push(m);
        outputs.push(y.as_slice().to_vec());
    }
    Dataset::from_samples(inputs, outputs, 20, 0.25).unwrap()
}

fn run(max_depth: usize, data: &Dataset, v: &DMatrix<f64>, phi: &DMatrix<f64>) -> (f64, Vec<f64>, usize) {
    let cfg = DipNetConfig {
        breadth: 3,
        depth: 1,
        layer_rank: 2,
        activation: Activation::Tanh,
        adaptive: true,
        max_depth: Some(max_depth),
    };
    let mut net = DipNet::new(cfg, v, phi, 4).unwrap();
    let tc = TrainConfig {
        epochs: 400,
        learning_rate: 5e-3,
        patience: 10,
        min_improvement: 1e-2,
        seed: 4,
        ..Default::default()
    };
    let rep = train(&mut net, data, &tc).unwrap();
    (rep.best_validation_loss, rep.validation_loss, rep.final_depth)
}

#[test]
fn deeper_cap_never_loses_to_shallow_cap() {
    let v = orthonormal(6, 3, 1);
    let phi = orthonormal(5, 3, 2);
    let data = dataset(&v, &phi, 200);
    let (shallow, shallow_curve, shallow_depth) = run(1, &data, &v, &phi);
    let (deep, deep_curve, _) = run(4, &data, &v, &phi);
    assert_eq!(shallow_depth, 1);
    // identical until the shallow run stops
    assert!(shallow_curve.len() < deep_curve.len(), "shallow run never stalled");
    assert_eq!(&deep_curve[..shallow_curve.len()], &shallow_curve[..]);
    assert!(deep <= shallow, "depth-4 cap {deep} vs depth-1 cap {shallow}");
}

#[test]
fn training_is_deterministic() {
    let v = orthonormal(6, 3, 3);
    let phi = orthonormal(5, 3, 4);
    let data = dataset(&v, &phi, 120);
    let a = run(3, &data, &v, &phi);
    let b = run(3, &data, &v, &phi);
    assert_eq!(a, b);
}
