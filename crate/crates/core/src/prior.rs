//! Gaussian priors on the discretized parameter.
//!
//! [`GaussianFieldPrior`] is the grid prior with precision built from
//! `δI − γΔ_h` (homogeneous Neumann) and covariance `A⁻¹ M A⁻¹`, where
//! `A = M (δI − γΔ_h)` is the lumped-mass assembled operator.
//! [`DenseGaussianPrior`] carries an explicit covariance for small
//! benchmark problems.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde_json::json;

use crate::container::{meta_f64, meta_usize, Container};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{BandLu, BandMatrix};
use crate::rng::SampleRng;

/// Common interface of Gaussian priors `N(m_pr, Γ_pr)` with `Γ_pr = L Lᵀ`.
pub trait GaussianPrior: Send + Sync {
    fn dim(&self) -> usize;

    fn mean(&self) -> &[f64];

    /// `L ξ`
    fn apply_factor(&self, xi: &[f64]) -> Vec<f64>;

    /// `Lᵀ x`
    fn apply_factor_transpose(&self, x: &[f64]) -> Vec<f64>;

    /// `L⁻¹ x`
    fn apply_inverse_factor(&self, x: &[f64]) -> Vec<f64>;

    /// `L⁻ᵀ x`
    fn apply_inverse_factor_transpose(&self, x: &[f64]) -> Vec<f64>;

    fn sample(&self, rng: &mut SampleRng) -> Vec<f64> {
        let xi = standard_normal(rng, self.dim());
        let mut m = self.apply_factor(&xi);
        for (mi, mp) in m.iter_mut().zip(self.mean()) {
            *mi += mp;
        }
        m
    }

    /// [`GaussianPrior::sample`] into a reused buffer; draws the same stream.
    fn sample_into(&self, rng: &mut SampleRng, out: &mut Vec<f64>) {
        *out = self.sample(rng);
    }

    fn whiten(&self, m: &[f64]) -> Result<Vec<f64>> {
        check_len("parameter", m.len(), self.dim())?;
        let centered: Vec<f64> = m.iter().zip(self.mean()).map(|(a, b)| a - b).collect();
        Ok(self.apply_inverse_factor(&centered))
    }

    fn unwhiten(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_len("whitened vector", w.len(), self.dim())?;
        let mut m = self.apply_factor(w);
        for (mi, mp) in m.iter_mut().zip(self.mean()) {
            *mi += mp;
        }
        Ok(m)
    }

    /// `Γ_pr⁻¹ x = L⁻ᵀ L⁻¹ x`
    fn apply_precision(&self, x: &[f64]) -> Vec<f64> {
        self.apply_inverse_factor_transpose(&self.apply_inverse_factor(x))
    }

    fn factor_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut l = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            l.set_column(j, &DVector::from_vec(self.apply_factor(&e)));
            e[j] = 0.0;
        }
        l
    }

    fn covariance_dense(&self) -> DMatrix<f64> {
        let l = self.factor_dense();
        &l * l.transpose()
    }
}

pub(crate) fn standard_normal(rng: &mut SampleRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Shape(format!("{what} has length {got}, expected {want}")));
    }
    Ok(())
}

/// `A_fd = δI + γ·L_h`, where `L_h = −Δ_h` is the five-point Laplacian with
/// homogeneous Neumann closure: each node couples only to neighbors inside
/// the grid, so constants are annihilated and the matrix is symmetric.
#[derive(Debug, Clone)]
pub struct PrecisionOperator {
    pub gamma: f64,
    pub delta: f64,
    matrix: BandMatrix,
}

impl PrecisionOperator {
    pub fn assemble(grid: &Grid, gamma: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gamma must be nonnegative, got {gamma}"
            )));
        }
        let nx = grid.nx;
        let mut a = BandMatrix::zeros(grid.n(), nx, nx);
        let cx = gamma / (grid.hx() * grid.hx());
        let cy = gamma / (grid.hy() * grid.hy());
        for k in 0..grid.n() {
            a.add(k, k, delta);
            let (i, j) = grid.ij(k);
            let mut link = |q: usize, c: f64| {
                a.add(k, k, c);
                a.add(k, q, -c);
            };
            if i > 0 {
                link(k - 1, cx);
            }
            if i + 1 < nx {
                link(k + 1, cx);
            }
            if j > 0 {
                link(k - nx, cy);
            }
            if j + 1 < grid.ny {
                link(k + nx, cy);
            }
        }
        Ok(Self {
            gamma,
            delta,
            matrix: a,
        })
    }

    pub fn matrix(&self) -> &BandMatrix {
        &self.matrix
    }

    /// `A x` in difference form `δx_p + γ Σ_q (x_p − x_q)/h²`, which maps
    /// constants to exactly `δ` times themselves.
    pub fn apply(&self, grid: &Grid, x: &[f64]) -> Vec<f64> {
        let nx = grid.nx;
        let cx = self.gamma / (grid.hx() * grid.hx());
        let cy = self.gamma / (grid.hy() * grid.hy());
        (0..grid.n())
            .map(|k| {
                let (i, j) = grid.ij(k);
                let mut lap = 0.0;
                if i > 0 {
                    lap += cx * (x[k] - x[k - 1]);
                }
                if i + 1 < nx {
                    lap += cx * (x[k] - x[k + 1]);
                }
                if j > 0 {
                    lap += cy * (x[k] - x[k - nx]);
                }
                if j + 1 < grid.ny {
                    lap += cy * (x[k] - x[k + nx]);
                }
                self.delta * x[k] + lap
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct GaussianFieldPrior {
    grid: Grid,
    mean: Vec<f64>,
    precision_op: PrecisionOperator,
    mass_diag: Vec<f64>,
    inv_sqrt_mass: Vec<f64>,
    factor: BandLu,
}

impl GaussianFieldPrior {
    pub fn new(grid: Grid, gamma: f64, delta: f64, mean: Vec<f64>) -> Result<Self> {
        check_len("prior mean", mean.len(), grid.n())?;
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("prior mean".into()));
        }
        let precision_op = PrecisionOperator::assemble(&grid, gamma, delta)?;
        let mass = grid.hx() * grid.hy();
        let mass_diag = vec![mass; grid.n()];
        let inv_sqrt_mass = mass_diag.iter().map(|m| 1.0 / m.sqrt()).collect();
        let factor = precision_op.matrix().clone().factor()?;
        Ok(Self {
            grid,
            mean,
            precision_op,
            mass_diag,
            inv_sqrt_mass,
            factor,
        })
    }

    pub fn zero_mean(grid: Grid, gamma: f64, delta: f64) -> Result<Self> {
        Self::new(grid, gamma, delta, vec![0.0; grid.n()])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.precision_op.gamma
    }

    pub fn delta(&self) -> f64 {
        self.precision_op.delta
    }

    pub fn precision_operator(&self) -> &PrecisionOperator {
        &self.precision_op
    }

    pub fn mass_diag(&self) -> &[f64] {
        &self.mass_diag
    }

    /// Assembled operator `A = M (δI − γΔ_h)` as a dense matrix.
    pub fn assembled_operator_dense(&self) -> DMatrix<f64> {
        let mut a = self.precision_op.matrix().to_dense();
        for (i, m) in self.mass_diag.iter().enumerate() {
            a.row_mut(i).scale_mut(*m);
        }
        a
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let g = &self.grid;
        let meta = json!({
            "nx": g.nx, "ny": g.ny, "lx": g.lx, "ly": g.ly,
            "gamma": self.gamma(), "delta": self.delta(),
        });
        let mut c = Container::new("prior", meta);
        c.push("mean", 1, g.n(), self.mean.clone());
        c.save(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let c = Container::load(path, "prior")?;
        let m = &c.meta;
        let grid = Grid::new(
            meta_usize(m, "nx")?,
            meta_usize(m, "ny")?,
            meta_f64(m, "lx")?,
            meta_f64(m, "ly")?,
        )?;
        let mean = c.block_shaped("mean", 1, grid.n())?.to_vec();
        Self::new(grid, meta_f64(m, "gamma")?, meta_f64(m, "delta")?, mean)
    }
}

impl GaussianPrior for GaussianFieldPrior {
    fn dim(&self) -> usize {
        self.grid.n()
    }

    fn mean(&self) -> &[f64] {
        &self.mean
    }

    // L = A_fd⁻¹ M^{-1/2}; A_fd is symmetric so Lᵀ = M^{-1/2} A_fd⁻¹.
    fn apply_factor(&self, xi: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = xi.iter().zip(&self.inv_sqrt_mass).map(|(a, s)| a * s).collect();
        self.factor.solve_in_place(&mut x);
        x
    }

    fn apply_factor_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.factor.solve(x);
        for (v, s) in y.iter_mut().zip(&self.inv_sqrt_mass) {
            *v *= s;
        }
        y
    }

    fn apply_inverse_factor(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.precision_op.apply(&self.grid, x);
        for (v, s) in y.iter_mut().zip(&self.inv_sqrt_mass) {
            *v /= s;
        }
        y
    }

    fn apply_inverse_factor_transpose(&self, x: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = x.iter().zip(&self.inv_sqrt_mass).map(|(a, s)| a / s).collect();
        self.precision_op.apply(&self.grid, &scaled)
    }
}

/// Gaussian prior with an explicit dense covariance (lower Cholesky factor).
#[derive(Debug, Clone)]
pub struct DenseGaussianPrior {
    mean: Vec<f64>,
    covariance: DMatrix<f64>,
    factor: DMatrix<f64>,
}

impl DenseGaussianPrior {
    pub fn new(mean: Vec<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if covariance.nrows() != n || covariance.ncols() != n {
            return Err(Error::Shape(format!(
                "covariance is {}x{}, mean has length {n}",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        let asym = (&covariance - covariance.transpose()).amax();
        if asym > 1e-12 * covariance.amax().max(1.0) {
            return Err(Error::InvalidArgument("covariance is not symmetric".into()));
        }
        let factor = covariance
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidArgument("covariance is not positive definite".into()))?
            .l();
        Ok(Self {
            mean,
            covariance,
            factor,
        })
    }

    pub fn standard(n: usize) -> Self {
        Self::isotropic(n, 1.0)
    }

    pub fn isotropic(n: usize, variance: f64) -> Self {
        Self::new(vec![0.0; n], DMatrix::identity(n, n) * variance).expect("isotropic covariance is SPD")
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let n = self.mean.len();
        let mut c = Container::new("dense-prior", json!({ "n": n }));
        c.push("mean", 1, n, self.mean.clone());
        c.push("covariance", n, n, self.covariance.transpose().as_slice().to_vec());
        c.save(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let c = Container::load(path, "dense-prior")?;
        let n = meta_usize(&c.meta, "n")?;
        let mean = c.block_shaped("mean", 1, n)?.to_vec();
        let cov = DMatrix::from_row_slice(n, n, c.block_shaped("covariance", n, n)?);
        Self::new(mean, cov)
    }
}

impl GaussianPrior for DenseGaussianPrior {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn mean(&self) -> &[f64] {
        &self.mean
    }

    fn apply_factor(&self, xi: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, x) in xi.iter().enumerate().take(i + 1) {
                acc += self.factor[(i, j)] * x;
            }
            *o = acc;
        }
        out
    }

    fn sample_into(&self, rng: &mut SampleRng, out: &mut Vec<f64>) {
        let n = self.dim();
        out.clear();
        out.extend((0..n).map(|_| Distribution::<f64>::sample(&StandardNormal, rng)));
        // L is lower triangular, so rows can overwrite in place from the bottom up
        for i in (0..n).rev() {
            let mut acc = 0.0;
            for j in 0..=i {
                acc += self.factor[(i, j)] * out[j];
            }
            out[i] = acc + self.mean[i];
        }
    }

    fn apply_factor_transpose(&self, x: &[f64]) -> Vec<f64> {
        (self.factor.transpose() * DVector::from_column_slice(x))
            .as_slice()
            .to_vec()
    }

    fn apply_inverse_factor(&self, x: &[f64]) -> Vec<f64> {
        let mut v = DVector::from_column_slice(x);
        self.factor.solve_lower_triangular_mut(&mut v);
        v.as_slice().to_vec()
    }

    fn apply_inverse_factor_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut v = DVector::from_column_slice(x);
        self.factor.tr_solve_lower_triangular_mut(&mut v);
        v.as_slice().to_vec()
    }

    fn covariance_dense(&self) -> DMatrix<f64> {
        self.covariance.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};

    #[test]
    fn buffered_dense_sampling_is_bit_identical() {
        let a = DMatrix::from_fn(5, 5, |i, j| ((i * 7 + j * 3) % 5) as f64 * 0.3 - 0.6);
        let prior = DenseGaussianPrior::new(
            vec![0.5, -1.0, 0.0, 2.0, 0.25],
            &a * a.transpose() + DMatrix::identity(5, 5),
        )
        .unwrap();
        let (mut r1, mut r2) = (
            stream_rng(3, Stream::InnerFresh, 0),
            stream_rng(3, Stream::InnerFresh, 0),
        );
        let mut buf = Vec::new();
        for _ in 0..50 {
            prior.sample_into(&mut r2, &mut buf);
            assert_eq!(prior.sample(&mut r1), buf);
        }
    }

    fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn gamma_zero_closed_form() {
        let grid = Grid::unit_square(2).unwrap();
        let prior = GaussianFieldPrior::zero_mean(grid, 0.0, 2.0).unwrap();
        let cov = prior.covariance_dense();
        assert!(rel_frobenius(&cov, &(DMatrix::identity(4, 4) * 0.25)) < 1e-15);
    }

    #[test]
    fn adr_configuration_assembles_identity_minus_laplacian() {
        let grid = Grid::unit_square(5).unwrap();
        let op = PrecisionOperator::assemble(&grid, 0.1, 1.0).unwrap();
        let a = op.matrix().to_dense();
        let h2 = grid.hx() * grid.hx();
        // interior node: 1 + 0.1·4/h² on the diagonal, −0.1/h² to each neighbor
        let k = grid.index(2, 2);
        assert!((a[(k, k)] - (1.0 + 0.4 / h2)).abs() < 1e-12);
        assert!((a[(k, k + 1)] + 0.1 / h2).abs() < 1e-12);
        assert!((a[(k, k + 5)] + 0.1 / h2).abs() < 1e-12);
        // corner node has two neighbors
        assert!((a[(0, 0)] - (1.0 + 0.2 / h2)).abs() < 1e-12);
    }

    #[test]
    fn covariance_matches_dense_inverse_oracle() {
        let grid = Grid::unit_square(8).unwrap();
        let prior = GaussianFieldPrior::zero_mean(grid, 1.0, 5.0).unwrap();
        let a = prior.assembled_operator_dense();
        let m = DMatrix::from_diagonal(&DVector::from_vec(prior.mass_diag().to_vec()));
        let a_inv = a.try_inverse().unwrap();
        let oracle = &a_inv * m * a_inv.transpose();
        assert!(rel_frobenius(&prior.covariance_dense(), &oracle) < 1e-10);
    }

    #[test]
    fn operator_symmetric_and_annihilates_constants() {
        let grid = Grid::new(7, 5, 2.0, 1.0).unwrap();
        let op = PrecisionOperator::assemble(&grid, 0.7, 3.0).unwrap();
        let a = op.matrix().to_dense();
        assert_eq!((&a - a.transpose()).amax(), 0.0);
        let ones = vec![1.0; grid.n()];
        for v in op.apply(&grid, &ones) {
            assert_eq!(v, 3.0);
        }
        let x: Vec<f64> = (0..grid.n()).map(|k| (k as f64).sin()).collect();
        let banded = op.matrix().mul_vec(&x);
        for (a, b) in op.apply(&grid, &x).iter().zip(&banded) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn whitening_examples() {
        let grid = Grid::unit_square(2).unwrap();
        let mean = vec![0.5, -1.0, 2.0, 0.0];
        let prior = GaussianFieldPrior::new(grid, 0.0, 2.0, mean.clone()).unwrap();
        assert!(prior.whiten(&mean).unwrap().iter().all(|v| *v == 0.0));
        let mut m = mean.clone();
        m[0] += 1.0;
        let w = prior.whiten(&m).unwrap();
        assert_eq!(w, vec![2.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn whiten_round_trip() {
        let grid = Grid::unit_square(9).unwrap();
        let mean = grid.sample_fn(|x, y| x - y);
        let prior = GaussianFieldPrior::new(grid, 0.3, 1.5, mean).unwrap();
        let mut worst = 0.0_f64;
        for s in 0..100 {
            let mut rng = stream_rng(11, Stream::PriorSamples, s);
            let m = prior.sample(&mut rng);
            let back = prior.unwhiten(&prior.whiten(&m).unwrap()).unwrap();
            for (a, b) in m.iter().zip(&back) {
                worst = worst.max((a - b).abs());
            }
        }
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn argument_errors() {
        let grid = Grid::unit_square(3).unwrap();
        assert!(GaussianFieldPrior::zero_mean(grid, 1.0, 0.0).is_err());
        assert!(GaussianFieldPrior::zero_mean(grid, -1.0, 1.0).is_err());
        assert!(GaussianFieldPrior::new(grid, 1.0, 1.0, vec![0.0; 4]).is_err());
        let prior = GaussianFieldPrior::zero_mean(grid, 1.0, 1.0).unwrap();
        assert!(prior.whiten(&[0.0; 3]).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let grid = Grid::unit_square(6).unwrap();
        let prior = GaussianFieldPrior::zero_mean(grid, 1.0, 2.0).unwrap();
        let a = prior.sample(&mut stream_rng(3, Stream::PriorSamples, 0));
        let b = prior.sample(&mut stream_rng(3, Stream::PriorSamples, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn persistence_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("prior.json");
        let grid = Grid::new(5, 4, 1.0, 0.5).unwrap();
        let prior = GaussianFieldPrior::new(grid, 0.2, 1.3, grid.sample_fn(|x, y| x * y)).unwrap();
        prior.save(&path).unwrap();
        let back = GaussianFieldPrior::load(&path).unwrap();
        assert_eq!(back.mean(), prior.mean());
        assert_eq!(back.covariance_dense(), prior.covariance_dense());
    }

    #[test]
    fn dense_prior_factor_round_trip() {
        let cov = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let prior = DenseGaussianPrior::new(vec![1.0, 2.0, 3.0], cov.clone()).unwrap();
        assert!(rel_frobenius(&GaussianPrior::covariance_dense(&prior), &cov) < 1e-15);
        let l = prior.factor_dense();
        assert!(rel_frobenius(&(&l * l.transpose()), &cov) < 1e-14);
        let x = [0.3, -0.2, 1.1];
        let p = prior.apply_precision(&x);
        let expect = cov.try_inverse().unwrap() * DVector::from_column_slice(&x);
        for i in 0..3 {
            assert!((p[i] - expect[i]).abs() < 1e-12);
        }
    }
}
