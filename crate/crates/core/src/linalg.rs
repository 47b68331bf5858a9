//! Banded storage and an in-place banded LU factorization.
//!
//! The grid operators in this crate are five-point stencils in row-major node
//! order, so their bandwidth equals the number of nodes per grid row. The
//! factorization does not pivot; every matrix factored here is either
//! symmetric positive definite or a diagonally dominant M-matrix plus a
//! nonnegative diagonal.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self {
            n,
            lower,
            upper,
            data: vec![0.0; n * (lower + upper + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.lower
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.upper
    }

    #[inline]
    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.lower >= i && j <= i + self.upper
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.lower - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i < self.n && j < self.n && self.in_band(i, j) {
            self.data[self.offset(i, j)]
        } else {
            0.0
        }
    }

    /// Adds `value` at `(i, j)`. Panics outside the band.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.offset(i, j);
        self.data[k] += value;
    }

    pub fn add_diagonal(&mut self, diag: &[f64]) {
        assert_eq!(diag.len(), self.n);
        for (i, d) in diag.iter().enumerate() {
            self.add(i, i, *d);
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.lower);
            let hi = (i + self.upper + 1).min(self.n);
            let row = &self.data[i * self.width()..(i + 1) * self.width()];
            let mut acc = 0.0;
            for j in lo..hi {
                acc += row[j + self.lower - i] * x[j];
            }
            *yi = acc;
        }
        y
    }

    pub fn mul_vec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for (i, xi) in x.iter().enumerate() {
            let lo = i.saturating_sub(self.lower);
            let hi = (i + self.upper + 1).min(self.n);
            for j in lo..hi {
                y[j] += self.data[self.offset(i, j)] * xi;
            }
        }
        y
    }

    pub fn transpose(&self) -> BandMatrix {
        let mut t = BandMatrix::zeros(self.n, self.upper, self.lower);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.lower);
            let hi = (i + self.upper + 1).min(self.n);
            for j in lo..hi {
                t.add(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn factor(self) -> Result<BandLu> {
        BandLu::new(self)
    }
}

/// LU factors stored in the band of the original matrix (unit lower factor implicit).
#[derive(Debug, Clone)]
pub struct BandLu {
    lu: BandMatrix,
}

impl BandLu {
    fn new(mut a: BandMatrix) -> Result<Self> {
        let n = a.n;
        let w = a.width();
        let (kl, ku) = (a.lower, a.upper);
        let scale = a.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        for k in 0..n {
            let pivot = a.data[k * w + kl];
            if !pivot.is_finite() || pivot.abs() <= tiny {
                return Err(Error::Solver(format!("zero pivot {pivot:e} at row {k} of {n}")));
            }
            let imax = (k + kl + 1).min(n);
            let jmax = (k + ku + 1).min(n);
            for i in k + 1..imax {
                let ik = i * w + (k + kl - i);
                let l = a.data[ik] / pivot;
                a.data[ik] = l;
                if l == 0.0 {
                    continue;
                }
                for j in k + 1..jmax {
                    let kj = k * w + (j + kl - k);
                    let ij = i * w + (j + kl - i);
                    a.data[ij] -= l * a.data[kj];
                }
            }
        }
        Ok(Self { lu: a })
    }

    pub fn dim(&self) -> usize {
        self.lu.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let a = &self.lu;
        let (n, w, kl, ku) = (a.n, a.width(), a.lower, a.upper);
        assert_eq!(x.len(), n);
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let mut acc = x[i];
            for (k, xk) in x.iter().enumerate().take(i).skip(lo) {
                acc -= a.data[i * w + (k + kl - i)] * xk;
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let hi = (i + ku + 1).min(n);
            let mut acc = x[i];
            for j in i + 1..hi {
                acc -= a.data[i * w + (j + kl - i)] * x[j];
            }
            x[i] = acc / a.data[i * w + kl];
        }
    }

    /// Solves `Aᵀ x = b` with the factors of `A`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let a = &self.lu;
        let (n, w, kl, ku) = (a.n, a.width(), a.lower, a.upper);
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        // Uᵀ z = b
        for i in 0..n {
            let lo = i.saturating_sub(ku);
            let mut acc = x[i];
            for (k, xk) in x.iter().enumerate().take(i).skip(lo) {
                acc -= a.data[k * w + (i + kl - k)] * xk;
            }
            x[i] = acc / a.data[i * w + kl];
        }
        // Lᵀ x = z
        for i in (0..n).rev() {
            let hi = (i + kl + 1).min(n);
            let mut acc = x[i];
            for k in i + 1..hi {
                acc -= a.data[k * w + (i + kl - k)] * x[k];
            }
            x[i] = acc;
        }
        x
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_band(n: usize, kl: usize, ku: usize, seed: u64) -> BandMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut a = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku + 1).min(n);
            let mut off = 0.0;
            for j in lo..hi {
                if j != i {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    off += v.abs();
                    a.add(i, j, v);
                }
            }
            a.add(i, i, off + 1.0);
        }
        a
    }

    #[test]
    fn lu_matches_dense_solve() {
        let a = random_band(40, 5, 3, 1);
        let dense = a.to_dense();
        let b: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let lu = a.clone().factor().unwrap();
        let x = lu.solve(&b);
        let expect = dense
            .clone()
            .lu()
            .solve(&nalgebra::DVector::from_vec(b.clone()))
            .unwrap();
        for (xi, ei) in x.iter().zip(expect.iter()) {
            assert!((xi - ei).abs() < 1e-12);
        }
        let xt = lu.solve_transpose(&b);
        let expect_t = dense.transpose().lu().solve(&nalgebra::DVector::from_vec(b)).unwrap();
        for (xi, ei) in xt.iter().zip(expect_t.iter()) {
            assert!((xi - ei).abs() < 1e-12);
        }
    }

    #[test]
    fn matvec_and_transpose_agree_with_dense() {
        let a = random_band(17, 2, 4, 9);
        let x: Vec<f64> = (0..17).map(|i| i as f64 - 8.0).collect();
        let dense = a.to_dense();
        let y = a.mul_vec(&x);
        let yt = a.mul_vec_transpose(&x);
        let xv = nalgebra::DVector::from_vec(x);
        let ey = &dense * &xv;
        let eyt = dense.transpose() * &xv;
        for i in 0..17 {
            assert!((y[i] - ey[i]).abs() < 1e-12);
            assert!((yt[i] - eyt[i]).abs() < 1e-12);
        }
        assert_eq!(a.transpose().to_dense(), dense.transpose());
    }

    #[test]
    fn singular_matrix_reports_breakdown() {
        let a = BandMatrix::zeros(3, 1, 1);
        assert!(matches!(a.factor(), Err(Error::Solver(_))));
    }
}
