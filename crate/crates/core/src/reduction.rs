//! Derivative-informed input basis (active subspace) and output basis (POD).

use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::container::{meta_usize, Container};
use crate::error::{Error, Result};
use crate::models::{Evaluator, ObservableMap};
use crate::par::try_map_indexed;
use crate::prior::GaussianPrior;
use crate::rng::{stream_rng, Stream};

/// How many eigenpairs to keep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankRule {
    Fixed(usize),
    /// Smallest `r` with `Σ_{i≤r} λ_i ≥ threshold · Σ λ_i`.
    Energy(f64),
}

impl RankRule {
    pub fn resolve(&self, spectrum: &[f64]) -> Result<usize> {
        match *self {
            RankRule::Fixed(r) => Ok(r),
            RankRule::Energy(t) => {
                if !(t > 0.0 && t <= 1.0) {
                    return Err(Error::InvalidArgument(format!("energy threshold {t} not in (0, 1]")));
                }
                Ok(energy_rank(spectrum, t))
            }
        }
    }
}

pub fn energy_rank(spectrum: &[f64], threshold: f64) -> usize {
    let total: f64 = spectrum.iter().map(|v| v.max(0.0)).sum();
    if total == 0.0 {
        return 1;
    }
    let mut acc = 0.0;
    for (i, v) in spectrum.iter().enumerate() {
        acc += v.max(0.0);
        if acc >= threshold * total {
            return i + 1;
        }
    }
    spectrum.len()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedBases {
    /// `n × r_M`, orthonormal in the prior-precision inner product.
    pub v: DMatrix<f64>,
    pub lambda_as: Vec<f64>,
    /// `d × r_F`, orthonormal.
    pub phi: DMatrix<f64>,
    pub lambda_pod: Vec<f64>,
    pub n_samples_as: usize,
    pub n_samples_pod: usize,
    pub seed: u64,
}

/// `(1/N) Σ J(m_i)ᵀ J(m_i)` over prior samples drawn from the active-subspace stream.
pub fn estimate_as_operator(
    map: &ObservableMap,
    prior: &dyn GaussianPrior,
    n_samples: usize,
    seed: u64,
) -> Result<DMatrix<f64>> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument(
            "active subspace needs at least one sample".into(),
        ));
    }
    if prior.dim() != map.n() {
        return Err(Error::Shape(format!(
            "prior dim {} vs map input {}",
            prior.dim(),
            map.n()
        )));
    }
    let jacobians = try_map_indexed(n_samples, |i| {
        let m = prior.sample(&mut stream_rng(seed, Stream::ActiveSubspace, i as u64));
        map.jacobian(&m).map_err(|e| Error::at_sample(i, e))
    })?;
    let n = map.n();
    let mut h = DMatrix::zeros(n, n);
    for j in &jacobians {
        h.gemm_tr(1.0, j, j, 1.0);
    }
    h /= n_samples as f64;
    Ok(h)
}

/// Top eigenpairs of a symmetric PSD estimate, sorted by decreasing value,
/// with roundoff-negative values clipped to zero and a sign convention that
/// makes each vector's largest-magnitude entry positive.
fn top_eigenpairs(mut sym: DMatrix<f64>, r: usize) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let n = sym.nrows();
    if r == 0 || r > n {
        return Err(Error::InvalidArgument(format!("rank {r} outside 1..={n}")));
    }
    let t = sym.transpose();
    sym += t;
    sym *= 0.5;
    if sym.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eigenproblem operator".into()));
    }
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigen("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let mut vecs = DMatrix::zeros(n, r);
    let mut vals = Vec::with_capacity(r);
    for (c, &k) in order.iter().take(r).enumerate() {
        let mut col = eig.eigenvectors.column(k).into_owned();
        let imax = col.iamax();
        if col[imax] < 0.0 {
            col.neg_mut();
        }
        vecs.set_column(c, &col);
        vals.push(eig.eigenvalues[k].max(0.0));
    }
    Ok((vecs, vals))
}

/// Solves `H v = λ Γ_pr⁻¹ v` through the whitened problem `Lᵀ H L u = λ u`, `v = L u`.
pub fn as_basis(h: &DMatrix<f64>, prior: &dyn GaussianPrior, r_m: usize) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let n = prior.dim();
    if h.nrows() != n || h.ncols() != n {
        return Err(Error::Shape(format!("H is {}x{}, prior dim {n}", h.nrows(), h.ncols())));
    }
    if r_m == 0 || r_m > n {
        return Err(Error::InvalidArgument(format!("r_M = {r_m} outside 1..={n}")));
    }
    let l = prior.factor_dense();
    let whitened = l.transpose() * h * &l;
    let (u, vals) = top_eigenpairs(whitened, r_m)?;
    Ok((l * u, vals))
}

fn outer_product_operator(outputs: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let d = outputs.first().map(|o| o.len()).unwrap_or(0);
    let mut h = DMatrix::zeros(d, d);
    for o in outputs {
        if o.len() != d {
            return Err(Error::Shape("outputs have inconsistent lengths".into()));
        }
        let v = DVector::from_column_slice(o);
        h.ger(1.0, &v, &v, 1.0);
    }
    h /= outputs.len() as f64;
    Ok(h)
}

/// POD basis from already-computed observables.
pub fn pod_from_outputs(outputs: &[Vec<f64>], r_f: usize) -> Result<(DMatrix<f64>, Vec<f64>)> {
    if outputs.is_empty() || r_f > outputs.len() {
        return Err(Error::InvalidArgument(format!(
            "POD with r_F = {r_f} needs at least r_F samples, got {}",
            outputs.len()
        )));
    }
    let d = outputs[0].len();
    if r_f == 0 || r_f > d {
        return Err(Error::InvalidArgument(format!("r_F = {r_f} outside 1..={d}")));
    }
    top_eigenpairs(outer_product_operator(outputs)?, r_f)
}

/// Top eigenpairs of `(1/N) Σ F(m_i) F(m_i)ᵀ` over prior samples from the POD stream.
pub fn pod_basis(
    map: &dyn Evaluator,
    prior: &dyn GaussianPrior,
    n_samples: usize,
    r_f: usize,
    seed: u64,
) -> Result<(DMatrix<f64>, Vec<f64>)> {
    if r_f == 0 || r_f > map.output_dim() {
        return Err(Error::InvalidArgument(format!(
            "r_F = {r_f} outside 1..={}",
            map.output_dim()
        )));
    }
    if n_samples < r_f {
        return Err(Error::InvalidArgument(format!("n_samples {n_samples} < r_F {r_f}")));
    }
    let outputs = try_map_indexed(n_samples, |i| {
        let m = prior.sample(&mut stream_rng(seed, Stream::Pod, i as u64));
        map.evaluate(&m).map_err(|e| Error::at_sample(i, e))
    })?;
    pod_from_outputs(&outputs, r_f)
}

impl ReducedBases {
    pub fn r_m(&self) -> usize {
        self.v.ncols()
    }

    pub fn r_f(&self) -> usize {
        self.phi.ncols()
    }

    /// Leading `r` columns of both bases.
    pub fn truncated(&self, r_m: usize, r_f: usize) -> Result<ReducedBases> {
        if r_m == 0 || r_m > self.r_m() || r_f == 0 || r_f > self.r_f() {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate {}x{} bases to {r_m}x{r_f}",
                self.r_m(),
                self.r_f()
            )));
        }
        Ok(ReducedBases {
            v: self.v.columns(0, r_m).into_owned(),
            lambda_as: self.lambda_as[..r_m].to_vec(),
            phi: self.phi.columns(0, r_f).into_owned(),
            lambda_pod: self.lambda_pod[..r_f].to_vec(),
            ..self.clone()
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let (n, d) = (self.v.nrows(), self.phi.nrows());
        let meta = json!({
            "n": n, "d": d, "r_M": self.r_m(), "r_F": self.r_f(),
            "n_samples_as": self.n_samples_as, "n_samples_pod": self.n_samples_pod,
            "seed": self.seed,
        });
        let mut c = Container::new("bases", meta);
        c.push("V", n, self.r_m(), self.v.transpose().as_slice().to_vec());
        c.push("lambda_as", 1, self.r_m(), self.lambda_as.clone());
        c.push("Phi", d, self.r_f(), self.phi.transpose().as_slice().to_vec());
        c.push("lambda_pod", 1, self.r_f(), self.lambda_pod.clone());
        c.save(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let c = Container::load(path, "bases")?;
        let m = &c.meta;
        let (n, d) = (meta_usize(m, "n")?, meta_usize(m, "d")?);
        let (rm, rf) = (meta_usize(m, "r_M")?, meta_usize(m, "r_F")?);
        Ok(Self {
            v: DMatrix::from_row_slice(n, rm, c.block_shaped("V", n, rm)?),
            lambda_as: c.block_shaped("lambda_as", 1, rm)?.to_vec(),
            phi: DMatrix::from_row_slice(d, rf, c.block_shaped("Phi", d, rf)?),
            lambda_pod: c.block_shaped("lambda_pod", 1, rf)?.to_vec(),
            n_samples_as: meta_usize(m, "n_samples_as")?,
            n_samples_pod: meta_usize(m, "n_samples_pod")?,
            seed: m.get("seed").and_then(|s| s.as_u64()).unwrap_or(0),
        })
    }
}
