use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `F(m) = G m + offset`; exact oracle model for closed-form EIG.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    g: DMatrix<f64>,
    offset: Vec<f64>,
}

impl LinearModel {
    pub fn new(g: DMatrix<f64>, offset: Vec<f64>) -> Result<Self> {
        if offset.len() != g.nrows() {
            return Err(Error::Shape(format!(
                "offset has length {}, G has {} rows",
                offset.len(),
                g.nrows()
            )));
        }
        if g.iter().chain(&offset).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("linear model coefficients".into()));
        }
        Ok(Self { g, offset })
    }

    pub fn without_offset(g: DMatrix<f64>) -> Self {
        let d = g.nrows();
        Self::new(g, vec![0.0; d]).expect("zero offset matches G")
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn n(&self) -> usize {
        self.g.ncols()
    }

    pub fn d(&self) -> usize {
        self.g.nrows()
    }

    pub fn evaluate(&self, m: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.apply(m)?;
        for (yi, c) in y.iter_mut().zip(&self.offset) {
            *yi += c;
        }
        Ok(y)
    }

    /// `G m + offset` into a reused buffer; `m` must have length `n`.
    pub(crate) fn evaluate_into(&self, m: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.resize(self.d(), 0.0);
        // column-wise accumulation, matching the matrix-vector product in `evaluate`
        for (j, mj) in m.iter().enumerate() {
            for (yi, g) in out.iter_mut().zip(self.g.column(j).iter()) {
                *yi += g * mj;
            }
        }
        for (yi, c) in out.iter_mut().zip(&self.offset) {
            *yi += c;
        }
    }

    pub(crate) fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.n() {
            return Err(Error::Shape(format!(
                "vector has length {}, G has {} columns",
                p.len(),
                self.n()
            )));
        }
        Ok((&self.g * DVector::from_column_slice(p)).as_slice().to_vec())
    }

    pub(crate) fn apply_transpose(&self, q: &[f64]) -> Result<Vec<f64>> {
        if q.len() != self.d() {
            return Err(Error::Shape(format!(
                "vector has length {}, G has {} rows",
                q.len(),
                self.d()
            )));
        }
        Ok((self.g.transpose() * DVector::from_column_slice(q)).as_slice().to_vec())
    }
}
