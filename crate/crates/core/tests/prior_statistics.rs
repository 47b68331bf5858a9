use dipoed::prior::GaussianPrior;
use dipoed::rng::{stream_rng, Stream};
use dipoed::{GaussianFieldPrior, Grid};
use nalgebra::DMatrix;

fn sample_covariance(samples: &[Vec<f64>]) -> DMatrix<f64> {
    let n = samples[0].len();
    let mut c = DMatrix::zeros(n, n);
    for s in samples {
        let v = nalgebra::DVector::from_column_slice(s);
        c.ger(1.0, &v, &v, 1.0);
    }
    c / samples.len() as f64
}

#[test]
fn whitened_samples_have_identity_covariance() {
    let prior = GaussianFieldPrior::zero_mean(Grid::unit_square(8).unwrap(), 0.1, 1.0).unwrap();
    let w: Vec<Vec<f64>> = (0..100_000)
        .map(|i| {
            prior
                .whiten(&prior.sample(&mut stream_rng(21, Stream::PriorSamples, i)))
                .unwrap()
        })
        .collect();
    let c = sample_covariance(&w);
    let worst = (c - DMatrix::identity(64, 64)).abs().max();
    assert!(worst < 0.05, "max deviation {worst}");
}

#[test]
fn sample_covariance_approaches_prior_covariance() {
    let grid = Grid::new(7, 5, 1.0, 0.6).unwrap();
    let prior = GaussianFieldPrior::zero_mean(grid, 0.05, 2.0).unwrap();
    let s: Vec<Vec<f64>> = (0..40_000)
        .map(|i| prior.sample(&mut stream_rng(22, Stream::PriorSamples, i)))
        .collect();
    let exact = prior.covariance_dense();
    let rel = (sample_covariance(&s) - &exact).norm() / exact.norm();
    assert!(rel < 0.03, "relative Frobenius error {rel}");
}

#[test]
fn factor_reproduces_covariance() {
    for (nx, gamma, delta) in [(6, 0.1, 1.0), (9, 1.0, 0.5), (12, 0.02, 3.0)] {
        let prior = GaussianFieldPrior::zero_mean(Grid::unit_square(nx).unwrap(), gamma, delta).unwrap();
        let l = prior.factor_dense();
        let a = prior.assembled_operator_dense();
        let ainv = a.clone().try_inverse().unwrap();
        let mass = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(prior.mass_diag()));
        let gamma_pr = &ainv * mass * &ainv;
        let rel = (&l * l.transpose() - &gamma_pr).norm() / gamma_pr.norm();
        assert!(rel < 1e-10, "grid {nx}: {rel:e}");
    }
}

#[test]
fn nonzero_mean_is_restored_by_unwhiten() {
    let grid = Grid::unit_square(6).unwrap();
    let mean: Vec<f64> = (0..36).map(|i| (i as f64 * 0.1).sin()).collect();
    let prior = GaussianFieldPrior::new(grid, 0.1, 1.0, mean.clone()).unwrap();
    assert_eq!(prior.unwhiten(&vec![0.0; 36]).unwrap(), mean);
    let n = 20_000;
    let mut avg = vec![0.0; 36];
    for i in 0..n {
        for (a, v) in avg
            .iter_mut()
            .zip(prior.sample(&mut stream_rng(23, Stream::PriorSamples, i)))
        {
            *a += v / n as f64;
        }
    }
    let sd = prior.covariance_dense().diagonal().map(|v| v.sqrt());
    for k in 0..36 {
        assert!((avg[k] - mean[k]).abs() < 5.0 * sd[k] / (n as f64).sqrt(), "node {k}");
    }
}
