//! Expected information gain: likelihood potentials, log-evidence estimates
//! and the double-loop Monte Carlo estimator, plus the closed form for
//! linear-Gaussian problems.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::design::check_indices;
use crate::error::{Error, Result};
use crate::models::Evaluator;
use crate::par::try_map_indexed;
use crate::prior::GaussianPrior;
use crate::rng::{stream_rng, Stream};

/// Independent Gaussian sensor noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    sigma: Vec<f64>,
}

impl NoiseModel {
    pub fn new(sigma: Vec<f64>) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::InvalidArgument("noise needs at least one sensor".into()));
        }
        if let Some(s) = sigma.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "noise sigma {s} must be positive and finite"
            )));
        }
        Ok(Self { sigma })
    }

    pub fn uniform(d: usize, sigma: f64) -> Result<Self> {
        Self::new(vec![sigma; d])
    }

    pub fn d(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }
}

/// `½ Σ (y_j − obs_j)² / σ_j²`
pub fn potential(obs: &[f64], y: &[f64], sigma: &[f64]) -> Result<f64> {
    if obs.len() != y.len() || y.len() != sigma.len() {
        return Err(Error::Shape(format!(
            "potential inputs have lengths {}, {}, {}",
            obs.len(),
            y.len(),
            sigma.len()
        )));
    }
    Ok(obs
        .iter()
        .zip(y)
        .zip(sigma)
        .map(|((o, yi), s)| {
            let r = (yi - o) / s;
            0.5 * r * r
        })
        .sum())
}

/// `log((1/N) Σ exp(−Φ_j))`, shifted by the smallest potential so the
/// dominant term is `exp(0)`.
pub fn log_normalization(potentials: &[f64]) -> Result<f64> {
    if potentials.is_empty() {
        return Err(Error::InvalidArgument("log normalization of an empty sample".into()));
    }
    let min = potentials.iter().copied().fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Err(Error::NonFinite("potential".into()));
    }
    let mut acc = 0.0;
    for p in potentials {
        if p.is_nan() {
            return Err(Error::NonFinite("potential".into()));
        }
        acc += (-(p - min)).exp();
    }
    Ok(-min + (acc / potentials.len() as f64).ln())
}

/// One outer realization over all candidate sensors.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterSample {
    pub m: Vec<f64>,
    /// `F_d(m)`
    pub f: Vec<f64>,
    /// full-candidate noise draw
    pub eps: Vec<f64>,
}

/// Frozen outer samples shared by every design evaluated in a run.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterBank {
    pub samples: Vec<OuterSample>,
    pub seed: u64,
}

impl OuterBank {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn d(&self) -> usize {
        self.samples.first().map_or(0, |s| s.f.len())
    }

    /// `W(F_i + ε_i)` for the (sorted) design.
    pub fn data(&self, i: usize, design: &[usize]) -> Vec<f64> {
        let s = &self.samples[i];
        design.iter().map(|&j| s.f[j] + s.eps[j]).collect()
    }
}

/// Draws `(m_i, ε_i)` from the outer stream of `seed` and evaluates `F_d(m_i)`.
pub fn simulate_outer_samples(
    prior: &dyn GaussianPrior,
    map: &dyn Evaluator,
    noise: &NoiseModel,
    n_out: usize,
    seed: u64,
) -> Result<OuterBank> {
    if n_out == 0 {
        return Err(Error::InvalidArgument("n_out must be at least 1".into()));
    }
    check_dims(prior, map, noise)?;
    let samples = try_map_indexed(n_out, |i| {
        let mut rng = stream_rng(seed, Stream::Outer, i as u64);
        let m = prior.sample(&mut rng);
        let eps = noise
            .sigma
            .iter()
            .map(|s| s * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
            .collect();
        let f = map.evaluate(&m).map_err(|e| Error::at_sample(i, e))?;
        Ok::<_, Error>(OuterSample { m, f, eps })
    })?;
    Ok(OuterBank { samples, seed })
}

fn check_dims(prior: &dyn GaussianPrior, map: &dyn Evaluator, noise: &NoiseModel) -> Result<()> {
    if prior.dim() != map.input_dim() {
        return Err(Error::Shape(format!(
            "prior dim {} vs evaluator input {}",
            prior.dim(),
            map.input_dim()
        )));
    }
    if noise.d() != map.output_dim() {
        return Err(Error::Shape(format!(
            "noise has {} sensors, evaluator has {} outputs",
            noise.d(),
            map.output_dim()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InnerMode {
    /// independent inner samples for every outer sample
    #[default]
    Fresh,
    /// one inner bank reused by all outer samples
    SharedBank,
}

/// Evaluator outputs at the inner samples, stored so repeated designs
/// (greedy candidates, surrogate sweeps) reuse them.
#[derive(Debug, Clone)]
pub struct InnerOutputs {
    mode: InnerMode,
    n_out: usize,
    n_in: usize,
    d: usize,
    seed: u64,
    evaluator_kind: String,
    /// row-major; fresh: `n_out·n_in` rows, shared: `n_in` rows
    data: Vec<f64>,
    evaluations: u64,
    pde_solves: u64,
}

/// Inner samples for outer index `i` in fresh mode, drawn in order from one stream.
fn fresh_inner_outputs(
    evaluator: &dyn Evaluator,
    prior: &dyn GaussianPrior,
    seed: u64,
    i: usize,
    n_in: usize,
    mut visit: impl FnMut(&[f64]),
) -> Result<()> {
    let mut rng = stream_rng(seed, Stream::InnerFresh, i as u64);
    let (mut m, mut f) = (Vec::new(), Vec::new());
    for j in 0..n_in {
        prior.sample_into(&mut rng, &mut m);
        evaluator
            .evaluate_into(&m, &mut f)
            .map_err(|e| Error::at_sample(i, Error::at_sample(j, e)))?;
        visit(&f);
    }
    Ok(())
}

impl InnerOutputs {
    pub fn build(
        evaluator: &dyn Evaluator,
        prior: &dyn GaussianPrior,
        mode: InnerMode,
        n_out: usize,
        n_in: usize,
        seed: u64,
    ) -> Result<Self> {
        if n_in == 0 {
            return Err(Error::InvalidArgument("n_in must be at least 1".into()));
        }
        if prior.dim() != evaluator.input_dim() {
            return Err(Error::Shape(format!(
                "prior dim {} vs evaluator input {}",
                prior.dim(),
                evaluator.input_dim()
            )));
        }
        let d = evaluator.output_dim();
        let rows = match mode {
            InnerMode::Fresh => {
                let blocks = try_map_indexed(n_out, |i| {
                    let mut block = Vec::with_capacity(n_in * d);
                    fresh_inner_outputs(evaluator, prior, seed, i, n_in, |f| block.extend_from_slice(f))?;
                    Ok::<_, Error>(block)
                })?;
                blocks.concat()
            }
            InnerMode::SharedBank => try_map_indexed(n_in, |j| {
                evaluator
                    .evaluate(&prior.sample(&mut stream_rng(seed, Stream::InnerShared, j as u64)))
                    .map_err(|e| Error::at_sample(j, e))
            })?
            .concat(),
        };
        let evaluations = (rows.len() / d.max(1)) as u64;
        Ok(Self {
            mode,
            n_out,
            n_in,
            d,
            seed,
            evaluator_kind: evaluator.kind().to_string(),
            data: rows,
            evaluations,
            pde_solves: evaluations * evaluator.solves_per_evaluation(),
        })
    }

    pub fn mode(&self) -> InnerMode {
        self.mode
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    /// Stored outputs, row-major.
    pub fn raw(&self) -> &[f64] {
        &self.data
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn pde_solves(&self) -> u64 {
        self.pde_solves
    }

    pub fn evaluator_kind(&self) -> &str {
        &self.evaluator_kind
    }

    fn rows_for(&self, outer: usize) -> std::slice::ChunksExact<'_, f64> {
        let block = self.n_in * self.d;
        match self.mode {
            InnerMode::Fresh => self.data[outer * block..(outer + 1) * block].chunks_exact(self.d),
            InnerMode::SharedBank => self.data.chunks_exact(self.d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_out: usize,
    pub n_in: usize,
    pub design_indices: Vec<usize>,
    pub seed: u64,
    pub evaluator_kind: String,
    pub inner_mode: InnerMode,
    /// evaluator calls in the inner loop
    pub inner_evaluations: u64,
    pub pde_solves: u64,
    #[serde(skip)]
    pub per_outer_terms: Vec<f64>,
}

impl EigEstimate {
    /// `outer_index,term` rows.
    pub fn terms_csv(&self) -> String {
        let mut s = String::from("outer_index,term\n");
        for (i, t) in self.per_outer_terms.iter().enumerate() {
            let _ = writeln!(s, "{i},{t:.16e}");
        }
        s
    }
}

fn mean_and_stderr(terms: &[f64]) -> (f64, f64) {
    let n = terms.len() as f64;
    let mean = terms.iter().sum::<f64>() / n;
    if terms.len() < 2 {
        return (mean, 0.0);
    }
    let var = terms.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

struct Restricted {
    design: Vec<usize>,
    sigma: Vec<f64>,
}

impl Restricted {
    fn new(noise: &NoiseModel, design: &[usize]) -> Result<Self> {
        check_indices(noise.d(), design)?;
        let mut design = design.to_vec();
        design.sort_unstable();
        let sigma = design.iter().map(|&j| noise.sigma[j]).collect();
        Ok(Self { design, sigma })
    }

    /// `Φ(F(m), y)` with `F(m)` over all candidates.
    #[inline]
    fn potential_full(&self, full: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for ((&j, yi), s) in self.design.iter().zip(y).zip(&self.sigma) {
            let r = (yi - full[j]) / s;
            acc += 0.5 * r * r;
        }
        acc
    }

    /// `−½‖Wε‖²_{Γ_n⁻¹}`
    fn log_likelihood_term(&self, eps: &[f64]) -> f64 {
        -self
            .design
            .iter()
            .zip(&self.sigma)
            .map(|(&j, s)| {
                let r = eps[j] / s;
                0.5 * r * r
            })
            .sum::<f64>()
    }
}

fn check_bank(bank: &OuterBank, noise: &NoiseModel) -> Result<()> {
    if bank.is_empty() {
        return Err(Error::InvalidArgument("outer bank is empty".into()));
    }
    if bank.d() != noise.d() {
        return Err(Error::Shape(format!(
            "outer bank has {} candidates, noise has {}",
            bank.d(),
            noise.d()
        )));
    }
    Ok(())
}

/// `log π̂(y_i)` for every outer sample, using stored inner outputs.
pub fn log_evidences(bank: &OuterBank, inner: &InnerOutputs, noise: &NoiseModel, design: &[usize]) -> Result<Vec<f64>> {
    check_bank(bank, noise)?;
    if inner.d != noise.d() {
        return Err(Error::Shape("inner outputs and noise disagree on d".into()));
    }
    if inner.mode == InnerMode::Fresh && inner.n_out < bank.len() {
        return Err(Error::Shape(format!(
            "inner outputs cover {} outer samples, bank has {}",
            inner.n_out,
            bank.len()
        )));
    }
    let restricted = Restricted::new(noise, design)?;
    try_map_indexed(bank.len(), |i| {
        let y = bank.data(i, &restricted.design);
        let pots: Vec<f64> = inner.rows_for(i).map(|f| restricted.potential_full(f, &y)).collect();
        log_normalization(&pots).map_err(|e| Error::at_sample(i, e))
    })
}

/// Same as [`log_evidences`] with fresh inner samples evaluated on the fly.
pub fn log_evidences_streaming(
    evaluator: &dyn Evaluator,
    prior: &dyn GaussianPrior,
    bank: &OuterBank,
    noise: &NoiseModel,
    design: &[usize],
    n_in: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_bank(bank, noise)?;
    check_dims(prior, evaluator, noise)?;
    if n_in == 0 {
        return Err(Error::InvalidArgument("n_in must be at least 1".into()));
    }
    let restricted = Restricted::new(noise, design)?;
    try_map_indexed(bank.len(), |i| {
        let y = bank.data(i, &restricted.design);
        let mut pots = Vec::with_capacity(n_in);
        fresh_inner_outputs(evaluator, prior, seed, i, n_in, |f| {
            pots.push(restricted.potential_full(f, &y))
        })?;
        log_normalization(&pots).map_err(|e| Error::at_sample(i, e))
    })
}

fn estimate_from_evidences(
    bank: &OuterBank,
    noise: &NoiseModel,
    design: &[usize],
    evidences: &[f64],
) -> Result<Vec<f64>> {
    let restricted = Restricted::new(noise, design)?;
    Ok(bank
        .samples
        .iter()
        .zip(evidences)
        .map(|(s, le)| restricted.log_likelihood_term(&s.eps) - le)
        .collect())
}

fn empty_estimate(bank: &OuterBank, n_in: usize, kind: &str, mode: InnerMode) -> EigEstimate {
    EigEstimate {
        value: 0.0,
        stderr: 0.0,
        n_out: bank.len(),
        n_in,
        design_indices: Vec::new(),
        seed: bank.seed,
        evaluator_kind: kind.to_string(),
        inner_mode: mode,
        inner_evaluations: 0,
        pde_solves: 0,
        per_outer_terms: vec![0.0; bank.len()],
    }
}

/// DLMC estimate from stored inner outputs. The reported inner cost is the
/// cost of building `inner`.
pub fn eig_with_inner(
    bank: &OuterBank,
    inner: &InnerOutputs,
    noise: &NoiseModel,
    design: &[usize],
) -> Result<EigEstimate> {
    if design.is_empty() {
        check_bank(bank, noise)?;
        return Ok(empty_estimate(bank, inner.n_in, &inner.evaluator_kind, inner.mode));
    }
    let evidences = log_evidences(bank, inner, noise, design)?;
    let terms = estimate_from_evidences(bank, noise, design, &evidences)?;
    let (value, stderr) = mean_and_stderr(&terms);
    Ok(EigEstimate {
        value,
        stderr,
        n_out: bank.len(),
        n_in: inner.n_in,
        design_indices: design.to_vec(),
        seed: bank.seed,
        evaluator_kind: inner.evaluator_kind.clone(),
        inner_mode: inner.mode,
        inner_evaluations: inner.evaluations,
        pde_solves: inner.pde_solves,
        per_outer_terms: terms,
    })
}

/// Double-loop Monte Carlo EIG of `design` with `evaluator` in the inner loop.
///
/// Per outer sample the term is `−½‖Wε_i‖²_{Γ_n⁻¹} − log π̂(y_i)`; the
/// Gaussian normalizing constant cancels and is omitted on both sides.
pub fn eig_dlmc(
    evaluator: &dyn Evaluator,
    prior: &dyn GaussianPrior,
    noise: &NoiseModel,
    bank: &OuterBank,
    design: &[usize],
    n_in: usize,
    inner_seed: u64,
    mode: InnerMode,
) -> Result<EigEstimate> {
    check_bank(bank, noise)?;
    check_dims(prior, evaluator, noise)?;
    check_indices(noise.d(), design)?;
    if n_in == 0 {
        return Err(Error::InvalidArgument("n_in must be at least 1".into()));
    }
    if design.is_empty() {
        return Ok(empty_estimate(bank, n_in, evaluator.kind(), mode));
    }
    match mode {
        InnerMode::SharedBank => {
            let inner = InnerOutputs::build(evaluator, prior, mode, bank.len(), n_in, inner_seed)?;
            eig_with_inner(bank, &inner, noise, design)
        }
        InnerMode::Fresh => {
            let evidences = log_evidences_streaming(evaluator, prior, bank, noise, design, n_in, inner_seed)?;
            let terms = estimate_from_evidences(bank, noise, design, &evidences)?;
            let (value, stderr) = mean_and_stderr(&terms);
            let evaluations = (bank.len() * n_in) as u64;
            Ok(EigEstimate {
                value,
                stderr,
                n_out: bank.len(),
                n_in,
                design_indices: design.to_vec(),
                seed: bank.seed,
                evaluator_kind: evaluator.kind().to_string(),
                inner_mode: mode,
                inner_evaluations: evaluations,
                pde_solves: evaluations * evaluator.solves_per_evaluation(),
                per_outer_terms: terms,
            })
        }
    }
}

/// `½ logdet(I + Γ_n^{-1/2} W G Γ_pr Gᵀ Wᵀ Γ_n^{-1/2})` for `G: d × n`.
pub fn eig_closed_form_linear_gaussian(
    g: &DMatrix<f64>,
    prior_covariance: &DMatrix<f64>,
    noise: &NoiseModel,
    design: &[usize],
) -> Result<f64> {
    let n = prior_covariance.nrows();
    if prior_covariance.ncols() != n || g.ncols() != n {
        return Err(Error::Shape(format!(
            "G is {}x{}, prior covariance {}x{}",
            g.nrows(),
            g.ncols(),
            n,
            prior_covariance.ncols()
        )));
    }
    if g.nrows() != noise.d() {
        return Err(Error::Shape(format!(
            "G has {} rows, noise has {} sensors",
            g.nrows(),
            noise.d()
        )));
    }
    check_indices(noise.d(), design)?;
    if (prior_covariance - prior_covariance.transpose()).amax() > 1e-12 * prior_covariance.amax().max(1.0) {
        return Err(Error::InvalidArgument("prior covariance is not symmetric".into()));
    }
    if prior_covariance.clone().cholesky().is_none() {
        return Err(Error::InvalidArgument(
            "prior covariance is not positive definite".into(),
        ));
    }
    if design.is_empty() {
        return Ok(0.0);
    }
    let mut sorted = design.to_vec();
    sorted.sort_unstable();
    let mut b = g.select_rows(&sorted);
    for (mut row, &j) in b.row_iter_mut().zip(&sorted) {
        row /= noise.sigma[j];
    }
    let sym = DMatrix::identity(sorted.len(), sorted.len()) + &b * prior_covariance * b.transpose();
    let sym = (&sym + sym.transpose()) * 0.5;
    let chol = sym
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("information matrix is not positive definite".into()))?;
    Ok(chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>())
}
