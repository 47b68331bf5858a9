//! Empirical check of how surrogate error propagates into log-evidence and
//! EIG errors: `|log π̂ − log π̃| ≤ C_i ε` and `|Ψ^dl − Ψ^nn| ≤ C ε`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::eig::{eig_with_inner, log_evidences, simulate_outer_samples, InnerMode, InnerOutputs, NoiseModel};
use crate::error::{Error, Result};
use crate::models::Evaluator;
use crate::par::try_map_indexed;
use crate::prior::GaussianPrior;

/// `sqrt(mean_i ‖F(m_i) − F̃(m_i)‖²)` over `inputs`.
pub fn generalization_error(surrogate: &dyn Evaluator, map: &dyn Evaluator, inputs: &[Vec<f64>]) -> Result<f64> {
    if inputs.is_empty() {
        return Err(Error::InvalidArgument(
            "generalization error needs a nonempty test set".into(),
        ));
    }
    let sq = try_map_indexed(inputs.len(), |i| {
        let a = map.evaluate(&inputs[i]).map_err(|e| Error::at_sample(i, e))?;
        let b = surrogate.evaluate(&inputs[i]).map_err(|e| Error::at_sample(i, e))?;
        Ok::<_, Error>(squared_distance(&a, &b))
    })?;
    Ok((sq.iter().sum::<f64>() / inputs.len() as f64).sqrt())
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `F + ε u` for a fixed unit vector `u`, so that its generalization error is `ε`.
pub struct PerturbedMap<'a> {
    base: &'a dyn Evaluator,
    offset: Vec<f64>,
}

impl<'a> PerturbedMap<'a> {
    pub fn new(base: &'a dyn Evaluator, direction: &[f64], epsilon: f64) -> Result<Self> {
        if direction.len() != base.output_dim() {
            return Err(Error::Shape(format!(
                "direction has length {}, map has {} outputs",
                direction.len(),
                base.output_dim()
            )));
        }
        let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("perturbation direction is zero".into()));
        }
        Ok(Self {
            base,
            offset: direction.iter().map(|v| epsilon * v / norm).collect(),
        })
    }
}

impl Evaluator for PerturbedMap<'_> {
    fn input_dim(&self) -> usize {
        self.base.input_dim()
    }

    fn output_dim(&self) -> usize {
        self.base.output_dim()
    }

    fn evaluate(&self, m: &[f64]) -> Result<Vec<f64>> {
        let mut f = self.base.evaluate(m)?;
        for (v, o) in f.iter_mut().zip(&self.offset) {
            *v += o;
        }
        Ok(f)
    }

    fn solves_per_evaluation(&self) -> u64 {
        self.base.solves_per_evaluation()
    }

    fn kind(&self) -> &'static str {
        "perturbed"
    }
}

/// A surrogate entering a sweep, with optional descriptive metadata.
pub struct SweepEntry<'a> {
    pub id: String,
    pub breadth: Option<usize>,
    pub l2_accuracy: Option<f64>,
    pub evaluator: &'a dyn Evaluator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub n_out: usize,
    pub n_in: usize,
    pub inner_mode: InnerMode,
    pub outer_seed: u64,
    pub inner_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateRecord {
    pub id: String,
    pub breadth: Option<usize>,
    pub l2_accuracy: Option<f64>,
    /// RMS output discrepancy over the inner prior samples.
    pub epsilon_hat: f64,
    /// Per design: mean over outer samples of `|log π̂ − log π̃|`.
    pub log_normalization_error_mean: Vec<f64>,
    /// Per design: max over outer samples of `|log π̂ − log π̃|`.
    pub log_normalization_error_max: Vec<f64>,
    /// Per design: `|Ψ^dl − Ψ^nn|`.
    pub eig_error: Vec<f64>,
    pub eig_surrogate: Vec<f64>,
    /// `max |log π̂ − log π̃| / ε̂`
    pub c_i_hat: f64,
    /// `max |Ψ^dl − Ψ^nn| / ε̂`
    pub c_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSweepReport {
    pub settings: SweepSettings,
    pub designs: Vec<Vec<usize>>,
    /// Per design, with the true map in the inner loop.
    pub eig_reference: Vec<f64>,
    pub eig_reference_stderr: Vec<f64>,
    pub records: Vec<SurrogateRecord>,
    /// Least-squares slope of `log mean_design |Ψ^dl − Ψ^nn|` against `log ε̂`.
    pub slope: f64,
    pub intercept: f64,
    /// Surrogate ids used in the fit.
    pub fit_ids: Vec<String>,
    /// Whether the fitted ε̂ values span at least one decade.
    pub spans_decade: bool,
    pub c_i_hat: f64,
    pub c_hat: f64,
    pub reference_pde_solves: u64,
}

impl ErrorSweepReport {
    /// One row per surrogate.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "surrogate_id,breadth,epsilon_hat,l2_accuracy,log_norm_error_mean,log_norm_error_max,eig_error_mean,eig_error_max\n",
        );
        for r in &self.records {
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
            let _ = writeln!(
                s,
                "{},{},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.id,
                r.breadth.map(|b| b.to_string()).unwrap_or_default(),
                r.epsilon_hat,
                r.l2_accuracy.map(|a| format!("{a:.16e}")).unwrap_or_default(),
                mean(&r.log_normalization_error_mean),
                max(&r.log_normalization_error_max),
                mean(&r.eig_error),
                max(&r.eig_error),
            );
        }
        s
    }
}

fn inner_rms(a: &InnerOutputs, b: &InnerOutputs) -> f64 {
    let (x, y) = (a.raw(), b.raw());
    let rows = a.evaluations().max(1) as f64;
    (squared_distance(x, y) / rows).sqrt()
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument("line fit needs at least two points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "degenerate fit: all abscissae are identical".into(),
        ));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Evaluates every surrogate against the true map on one frozen outer bank
/// and identical inner samples, then fits the error-vs-ε̂ scaling.
pub fn bound_sweep(
    surrogates: &[SweepEntry<'_>],
    map: &dyn Evaluator,
    prior: &dyn GaussianPrior,
    noise: &NoiseModel,
    designs: &[Vec<usize>],
    settings: SweepSettings,
) -> Result<ErrorSweepReport> {
    if surrogates.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "a sweep needs at least two surrogates, got {}",
            surrogates.len()
        )));
    }
    if designs.is_empty() || designs.iter().any(|d| d.is_empty()) {
        return Err(Error::InvalidArgument("a sweep needs nonempty designs".into()));
    }
    let SweepSettings {
        n_out,
        n_in,
        inner_mode,
        outer_seed,
        inner_seed,
    } = settings;
    let bank = simulate_outer_samples(prior, map, noise, n_out, outer_seed)?;
    let reference = InnerOutputs::build(map, prior, inner_mode, n_out, n_in, inner_seed)?;
    let mut eig_reference = Vec::with_capacity(designs.len());
    let mut eig_reference_stderr = Vec::with_capacity(designs.len());
    let mut ref_evidence = Vec::with_capacity(designs.len());
    for d in designs {
        let est = eig_with_inner(&bank, &reference, noise, d)?;
        eig_reference.push(est.value);
        eig_reference_stderr.push(est.stderr);
        ref_evidence.push(log_evidences(&bank, &reference, noise, d)?);
    }

    let mut records = Vec::with_capacity(surrogates.len());
    for entry in surrogates {
        let inner = InnerOutputs::build(entry.evaluator, prior, inner_mode, n_out, n_in, inner_seed)
            .map_err(|e| e.context(format!("surrogate '{}'", entry.id)))?;
        let epsilon_hat = inner_rms(&reference, &inner);
        let mut rec = SurrogateRecord {
            id: entry.id.clone(),
            breadth: entry.breadth,
            l2_accuracy: entry.l2_accuracy,
            epsilon_hat,
            log_normalization_error_mean: Vec::new(),
            log_normalization_error_max: Vec::new(),
            eig_error: Vec::new(),
            eig_surrogate: Vec::new(),
            c_i_hat: 0.0,
            c_hat: 0.0,
        };
        let mut max_ln = 0.0f64;
        let mut max_eig = 0.0f64;
        for (k, d) in designs.iter().enumerate() {
            let ev = log_evidences(&bank, &inner, noise, d)?;
            let diffs: Vec<f64> = ev.iter().zip(&ref_evidence[k]).map(|(a, b)| (a - b).abs()).collect();
            let dmax = diffs.iter().copied().fold(0.0, f64::max);
            rec.log_normalization_error_mean
                .push(diffs.iter().sum::<f64>() / diffs.len() as f64);
            rec.log_normalization_error_max.push(dmax);
            let est = eig_with_inner(&bank, &inner, noise, d)?;
            let err = (est.value - eig_reference[k]).abs();
            rec.eig_error.push(err);
            rec.eig_surrogate.push(est.value);
            max_ln = max_ln.max(dmax);
            max_eig = max_eig.max(err);
        }
        if epsilon_hat > 0.0 {
            rec.c_i_hat = max_ln / epsilon_hat;
            rec.c_hat = max_eig / epsilon_hat;
        }
        records.push(rec);
    }

    let mut fit_ids = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in &records {
        let mean_err = r.eig_error.iter().sum::<f64>() / r.eig_error.len() as f64;
        if r.epsilon_hat > 0.0 && mean_err > 0.0 {
            fit_ids.push(r.id.clone());
            xs.push(r.epsilon_hat.ln());
            ys.push(mean_err.ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "degenerate fit: only {} surrogate(s) with nonzero ε̂ and EIG error",
            xs.len()
        )));
    }
    let (slope, intercept) = fit_line(&xs, &ys)?;
    let span = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) - xs.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ErrorSweepReport {
        settings,
        designs: designs.to_vec(),
        eig_reference,
        eig_reference_stderr,
        c_i_hat: records.iter().map(|r| r.c_i_hat).fold(0.0, f64::max),
        c_hat: records.iter().map(|r| r.c_hat).fold(0.0, f64::max),
        records,
        slope,
        intercept,
        fit_ids,
        spans_decade: span >= 10f64.ln() - 1e-12,
        reference_pde_solves: reference.pde_solves(),
    })
}
