//! Run configuration: a single JSON document, optionally patched with
//! dotted-path overrides, validated in full before any computation.

use std::collections::BTreeSet;

use dipoed::eig::InnerMode;
use dipoed::models::{NewtonSettings, SensorSpec, Source};
use serde::Deserialize;
use serde_json::Value;

use crate::Step;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrVec {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl ScalarOrVec {
    pub fn expand(&self, len: usize) -> Vec<f64> {
        match self {
            ScalarOrVec::Scalar(v) => vec![*v; len],
            ScalarOrVec::Vector(v) => v.clone(),
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            ScalarOrVec::Scalar(v) => std::slice::from_ref(v),
            ScalarOrVec::Vector(v) => v,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub threads: Option<usize>,
    pub output_dir: Option<String>,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub prior: PriorConfig,
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub reduction: ReductionConfig,
    #[serde(default)]
    pub network: NetworkConfig,
    #[serde(default)]
    pub training: TrainingConfig,
    #[serde(default)]
    pub eig: EigConfig,
    #[serde(default)]
    pub greedy: GreedyConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub sample_prior: SamplePriorConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: Option<usize>,
    #[serde(default = "one")]
    pub lx: f64,
    #[serde(default = "one")]
    pub ly: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorConfig {
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub mean: Option<ScalarOrVec>,
    /// Dense covariance for the linear model.
    pub covariance: Option<Vec<Vec<f64>>>,
    /// Isotropic variance for the linear model when no covariance is given.
    pub variance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Adr,
    Elliptic,
    Linear,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdrParamsConfig {
    pub k: Option<f64>,
    pub v0: Option<f64>,
    pub reaction_scale: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    #[serde(default)]
    pub params: AdrParamsConfig,
    pub newton: Option<NewtonSettings>,
    pub sensors: Option<SensorSpec>,
    pub source: Option<Source>,
    /// `d × n` observation matrix of the linear model, row by row.
    pub matrix: Option<Vec<Vec<f64>>>,
    pub offset: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma: Option<ScalarOrVec>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionConfig {
    pub r_m: Option<usize>,
    pub r_f: Option<usize>,
    /// Spectral energy fraction used for whichever rank is not fixed.
    pub energy: Option<f64>,
    pub n_samples_as: Option<usize>,
    /// Fresh prior samples for POD; unset means the training outputs of the dataset.
    pub n_samples_pod: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub breadth: Option<usize>,
    pub depth: Option<usize>,
    pub layer_rank: Option<usize>,
    pub activation: Option<dipoed::dipnet::Activation>,
    pub adaptive: Option<bool>,
    pub max_depth: Option<usize>,
    /// Artifact stem, `<name>.json` under the output directory.
    pub name: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    pub epochs: Option<usize>,
    pub batch: Option<usize>,
    pub lr: Option<f64>,
    pub final_lr: Option<f64>,
    pub patience: Option<usize>,
    pub min_improvement: Option<f64>,
    pub early_stopping: Option<bool>,
    pub n_samples: Option<usize>,
    pub n_test: Option<usize>,
    pub validation_fraction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EvaluatorChoice {
    #[default]
    #[serde(alias = "true")]
    TrueMap,
    Surrogate,
    ClosedForm,
}

impl EvaluatorChoice {
    pub fn name(&self) -> &'static str {
        match self {
            EvaluatorChoice::TrueMap => "true_map",
            EvaluatorChoice::Surrogate => "surrogate",
            EvaluatorChoice::ClosedForm => "closed_form",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigConfig {
    pub n_out: Option<usize>,
    pub n_in: Option<usize>,
    pub inner_mode: Option<InnerMode>,
    pub evaluator: Option<EvaluatorChoice>,
    pub design: Option<Vec<usize>>,
    /// Network artifact stem used by the surrogate evaluator.
    pub network: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreedyConfig {
    pub r: Option<usize>,
    pub evaluator: Option<EvaluatorChoice>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurrogateSpec {
    pub id: Option<String>,
    /// Constructed surrogate `F + ε u`.
    pub epsilon: Option<f64>,
    /// Trained network artifact stem.
    pub network: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomDesigns {
    pub count: usize,
    pub r: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub surrogates: Vec<SurrogateSpec>,
    pub designs: Option<Vec<Vec<usize>>>,
    pub random_designs: Option<RandomDesigns>,
    pub n_out: Option<usize>,
    pub n_in: Option<usize>,
    pub inner_mode: Option<InnerMode>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplePriorConfig {
    pub n: Option<usize>,
}

/// Sets `path` (dot separated) in `doc` to `raw`, parsed as JSON when
/// possible and kept as a string otherwise.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), String> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| format!("override '{assignment}' is not of the form path=value"))?;
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(format!("override path '{path}' has an empty component"));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    for (i, key) in keys.iter().enumerate() {
        if !node.is_object() {
            return Err(format!(
                "override path '{path}': '{}' is not an object",
                keys[..i].join(".")
            ));
        }
        let map = node.as_object_mut().expect("checked above");
        if i + 1 == keys.len() {
            map.insert(key.to_string(), value);
            return Ok(());
        }
        node = map
            .entry(key.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("path has at least one component")
}

/// Parses a document (after overrides) into a typed config; type errors
/// name the offending field.
pub fn parse(doc: Value) -> Result<RunConfig, Vec<String>> {
    serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        vec![format!("{path}: {}", e.into_inner())]
    })
}

#[derive(Default)]
struct Problems(Vec<String>);

impl Problems {
    fn push(&mut self, field: &str, msg: impl std::fmt::Display) {
        self.0.push(format!("{field}: {msg}"));
    }

    fn positive(&mut self, field: &str, v: Option<f64>) {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                self.push(field, format!("must be positive and finite, got {v}"));
            }
        }
    }

    fn at_least(&mut self, field: &str, v: Option<usize>, min: usize) {
        if let Some(v) = v {
            if v < min {
                self.push(field, format!("must be at least {min}, got {v}"));
            }
        }
    }

    fn required<T>(&mut self, field: &str, v: &Option<T>) -> bool {
        if v.is_none() {
            self.push(field, "missing");
        }
        v.is_some()
    }

    fn design(&mut self, field: &str, idx: &[usize], d: Option<usize>) {
        let mut seen = BTreeSet::new();
        for &i in idx {
            if !seen.insert(i) {
                self.push(field, format!("sensor {i} listed twice"));
            }
            if let Some(d) = d {
                if i >= d {
                    self.push(field, format!("sensor {i} out of range for {d} candidates"));
                }
            }
        }
    }
}

impl RunConfig {
    pub fn model_kind(&self) -> Option<ModelKind> {
        self.model.as_ref().map(|m| m.kind)
    }

    /// Parameter dimension implied by the config, when determinable.
    pub fn parameter_dim(&self) -> Option<usize> {
        match self.model_kind() {
            Some(ModelKind::Linear) => self.model.as_ref()?.matrix.as_ref()?.first().map(|r| r.len()),
            _ => self.grid.as_ref().map(|g| g.nx * g.ny.unwrap_or(g.nx)),
        }
    }

    /// Number of candidate sensors implied by the config, when determinable.
    pub fn sensor_count(&self) -> Option<usize> {
        let model = self.model.as_ref()?;
        match model.kind {
            ModelKind::Linear => model.matrix.as_ref().map(|m| m.len()),
            _ => match model.sensors.as_ref()? {
                SensorSpec::Grid { count_x, count_y, .. } => Some(count_x * count_y),
                SensorSpec::Points(p) => Some(p.len()),
            },
        }
    }

    pub fn network_name(&self) -> String {
        self.network.name.clone().unwrap_or_else(|| "dipnet".into())
    }

    /// Every problem with the config for `step`, in document order.
    pub fn validate(&self, step: Step) -> Vec<String> {
        let mut p = Problems::default();
        if self.output_dir.as_deref().is_none_or(str::is_empty) {
            p.push("output_dir", "missing");
        }
        p.at_least("threads", self.threads, 1);
        let uses_model = step != Step::SamplePrior || self.model.is_some();
        let linear = self.model_kind() == Some(ModelKind::Linear);
        self.check_grid(&mut p, !linear);
        self.check_prior(&mut p, linear);
        if uses_model {
            self.check_model(&mut p);
        }
        let d = self.sensor_count();
        if matches!(step, Step::EstimateEig | Step::Greedy | Step::Verify | Step::Oracle) {
            self.check_noise(&mut p, d);
        }
        match step {
            Step::SamplePrior => {
                if p.required("sample_prior.n", &self.sample_prior.n) {
                    p.at_least("sample_prior.n", self.sample_prior.n, 1);
                }
            }
            Step::GenData => self.check_dataset(&mut p),
            Step::BuildBases => self.check_reduction(&mut p, d),
            Step::Train => {
                self.check_network(&mut p);
                self.check_training(&mut p);
            }
            Step::EstimateEig => {
                self.check_eig(&mut p, "eig", self.eig.n_out, self.eig.n_in);
                if let Some(design) = &self.eig.design {
                    p.design("eig.design", design, d);
                } else {
                    p.push("eig.design", "missing");
                }
                if self.eig.evaluator == Some(EvaluatorChoice::ClosedForm) {
                    p.push("eig.evaluator", "closed_form is served by the oracle subcommand");
                }
            }
            Step::Greedy => {
                self.check_eig(&mut p, "eig", self.eig.n_out, self.eig.n_in);
                self.check_r(&mut p, "greedy.r", d);
                if self.greedy.evaluator == Some(EvaluatorChoice::ClosedForm) && !linear {
                    p.push("greedy.evaluator", "closed_form requires the linear model");
                }
            }
            Step::Verify => self.check_verify(&mut p, d),
            Step::Oracle => {
                if !linear {
                    p.push("model.kind", "the oracle needs the linear model");
                }
                if self.eig.design.is_none() && self.greedy.r.is_none() {
                    p.push("greedy.r", "missing (or give eig.design)");
                }
                if let Some(design) = &self.eig.design {
                    p.design("eig.design", design, d);
                }
                if self.greedy.r.is_some() {
                    self.check_r(&mut p, "greedy.r", d);
                }
            }
        }
        p.0
    }

    fn check_grid(&self, p: &mut Problems, needed: bool) {
        let Some(g) = &self.grid else {
            if needed {
                p.push("grid", "missing");
            }
            return;
        };
        p.at_least("grid.nx", Some(g.nx), 3);
        p.at_least("grid.ny", g.ny, 3);
        p.positive("grid.lx", Some(g.lx));
        p.positive("grid.ly", Some(g.ly));
    }

    fn check_prior(&self, p: &mut Problems, linear: bool) {
        let pr = &self.prior;
        let n = self.parameter_dim();
        if let Some(mean) = &pr.mean {
            if mean.values().iter().any(|v| !v.is_finite()) {
                p.push("prior.mean", "must be finite");
            }
            if let (ScalarOrVec::Vector(v), Some(n)) = (mean, n) {
                if v.len() != n {
                    p.push(
                        "prior.mean",
                        format!("has length {}, parameter dimension is {n}", v.len()),
                    );
                }
            }
        }
        if linear {
            p.positive("prior.variance", pr.variance);
            if let Some(c) = &pr.covariance {
                if pr.variance.is_some() {
                    p.push("prior.variance", "give either covariance or variance");
                }
                if let Some(n) = n {
                    if c.len() != n || c.iter().any(|row| row.len() != n) {
                        p.push("prior.covariance", format!("must be {n}x{n}"));
                    }
                }
            }
        } else {
            if p.required("prior.gamma", &pr.gamma) {
                p.positive("prior.gamma", pr.gamma);
            }
            if p.required("prior.delta", &pr.delta) {
                p.positive("prior.delta", pr.delta);
            }
        }
    }

    fn check_model(&self, p: &mut Problems) {
        let Some(m) = &self.model else {
            p.push("model", "missing");
            return;
        };
        match m.kind {
            ModelKind::Linear => match &m.matrix {
                None => p.push("model.matrix", "missing"),
                Some(rows) => {
                    let n = rows.first().map_or(0, |r| r.len());
                    if rows.is_empty() || n == 0 || rows.iter().any(|r| r.len() != n) {
                        p.push("model.matrix", "must be a nonempty rectangular matrix");
                    }
                    if rows.iter().flatten().any(|v| !v.is_finite()) {
                        p.push("model.matrix", "must be finite");
                    }
                    if let Some(off) = &m.offset {
                        if off.len() != rows.len() {
                            p.push("model.offset", format!("needs {} entries", rows.len()));
                        }
                    }
                }
            },
            ModelKind::Adr | ModelKind::Elliptic => {
                p.positive("model.params.k", m.params.k);
                if let Some(v0) = m.params.v0 {
                    if !v0.is_finite() {
                        p.push("model.params.v0", "must be finite");
                    }
                }
                if let Some(s) = m.params.reaction_scale {
                    if !(s >= 0.0 && s.is_finite()) {
                        p.push("model.params.reaction_scale", "must be nonnegative");
                    }
                }
                if let Some(nw) = &m.newton {
                    p.positive("model.newton.tolerance", Some(nw.tolerance));
                    p.at_least("model.newton.max_iterations", Some(nw.max_iterations), 1);
                }
                if let (Some(Source::Nodal(v)), Some(n)) = (&m.source, self.parameter_dim()) {
                    if v.len() != n {
                        p.push("model.source", format!("nodal source needs {n} values"));
                    }
                }
                match &m.sensors {
                    None => p.push("model.sensors", "missing"),
                    Some(spec) => self.check_sensors(p, spec),
                }
            }
        }
    }

    fn check_sensors(&self, p: &mut Problems, spec: &SensorSpec) {
        let (lx, ly) = self.grid.as_ref().map_or((1.0, 1.0), |g| (g.lx, g.ly));
        let coords: Vec<(f64, f64)> = match spec {
            SensorSpec::Grid {
                x0,
                y0,
                dx,
                dy,
                count_x,
                count_y,
            } => {
                if *count_x == 0 || *count_y == 0 {
                    p.push("model.sensors", "sensor grid is empty");
                }
                (0..*count_y)
                    .flat_map(|j| (0..*count_x).map(move |i| (x0 + i as f64 * dx, y0 + j as f64 * dy)))
                    .collect()
            }
            SensorSpec::Points(pts) => {
                if pts.is_empty() {
                    p.push("model.sensors", "no sensor points");
                }
                pts.clone()
            }
        };
        let tol = 1e-12;
        if let Some((x, y)) = coords
            .iter()
            .find(|(x, y)| !(*x >= -tol && *x <= lx + tol && *y >= -tol && *y <= ly + tol))
        {
            p.push("model.sensors", format!("sensor at ({x}, {y}) lies outside the domain"));
        }
    }

    fn check_noise(&self, p: &mut Problems, d: Option<usize>) {
        let Some(sigma) = &self.noise.sigma else {
            p.push("noise.sigma", "missing");
            return;
        };
        if sigma.values().iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            p.push("noise.sigma", "every entry must be positive and finite");
        }
        if let (ScalarOrVec::Vector(v), Some(d)) = (sigma, d) {
            if v.len() != d {
                p.push("noise.sigma", format!("has {} entries for {d} sensors", v.len()));
            }
        }
    }

    fn check_dataset(&self, p: &mut Problems) {
        let t = &self.training;
        if p.required("training.n_samples", &t.n_samples) {
            p.at_least("training.n_samples", t.n_samples, 1);
        }
        if let (Some(n), Some(test)) = (t.n_samples, t.n_test) {
            if test >= n {
                p.push(
                    "training.n_test",
                    format!("{test} leaves no training samples out of {n}"),
                );
            }
        }
        if let Some(f) = t.validation_fraction {
            if !(0.0..1.0).contains(&f) {
                p.push("training.validation_fraction", format!("must lie in [0, 1), got {f}"));
            }
        }
    }

    fn check_reduction(&self, p: &mut Problems, d: Option<usize>) {
        let r = &self.reduction;
        let n = self.parameter_dim();
        if r.energy.is_none() {
            p.required("reduction.r_m", &r.r_m);
            p.required("reduction.r_f", &r.r_f);
        }
        if let Some(e) = r.energy {
            if !(e > 0.0 && e <= 1.0) {
                p.push("reduction.energy", format!("must lie in (0, 1], got {e}"));
            }
        }
        if let Some(rm) = r.r_m {
            if rm == 0 || n.is_some_and(|n| rm > n) {
                p.push("reduction.r_m", format!("must lie in 1..={}", n.unwrap_or(rm)));
            }
        }
        if let Some(rf) = r.r_f {
            if rf == 0 || d.is_some_and(|d| rf > d) {
                p.push("reduction.r_f", format!("must lie in 1..={}", d.unwrap_or(rf)));
            }
            if let Some(ns) = r.n_samples_pod {
                if ns < rf {
                    p.push("reduction.n_samples_pod", format!("must be at least r_f = {rf}"));
                }
            }
        }
        p.at_least("reduction.n_samples_as", r.n_samples_as, 1);
        p.at_least("reduction.n_samples_pod", r.n_samples_pod, 1);
    }

    fn check_network(&self, p: &mut Problems) {
        let nw = &self.network;
        if p.required("network.breadth", &nw.breadth) {
            p.at_least("network.breadth", nw.breadth, 2);
        }
        if p.required("network.layer_rank", &nw.layer_rank) {
            p.at_least("network.layer_rank", nw.layer_rank, 1);
            if let (Some(k), Some(b)) = (nw.layer_rank, nw.breadth) {
                if k >= b {
                    p.push("network.layer_rank", format!("must be below the breadth {b}, got {k}"));
                }
            }
        }
        p.at_least("network.depth", nw.depth, 1);
        if let Some(md) = nw.max_depth {
            if md < nw.depth.unwrap_or(1) {
                p.push("network.max_depth", "must be at least network.depth");
            }
        }
        if let Some(name) = &nw.name {
            check_stem(p, "network.name", name);
        }
    }

    fn check_training(&self, p: &mut Problems) {
        let t = &self.training;
        p.at_least("training.epochs", t.epochs, 1);
        p.at_least("training.batch", t.batch, 1);
        p.positive("training.lr", t.lr);
        p.positive("training.final_lr", t.final_lr);
        if let Some(m) = t.min_improvement {
            if !(0.0..1.0).contains(&m) {
                p.push("training.min_improvement", format!("must lie in [0, 1), got {m}"));
            }
        }
    }

    fn check_eig(&self, p: &mut Problems, section: &str, n_out: Option<usize>, n_in: Option<usize>) {
        let out = format!("{section}.n_out");
        let inn = format!("{section}.n_in");
        if p.required(&out, &n_out) {
            p.at_least(&out, n_out, 1);
        }
        if p.required(&inn, &n_in) {
            p.at_least(&inn, n_in, 1);
        }
        if let Some(name) = &self.eig.network {
            check_stem(p, "eig.network", name);
        }
    }

    fn check_r(&self, p: &mut Problems, field: &str, d: Option<usize>) {
        match self.greedy.r {
            None => p.push(field, "missing"),
            Some(r) => {
                if r == 0 || d.is_some_and(|d| r > d) {
                    p.push(field, format!("must lie in 1..={}", d.unwrap_or(r)));
                }
            }
        }
    }

    fn check_verify(&self, p: &mut Problems, d: Option<usize>) {
        let v = &self.verify;
        self.check_eig(p, "verify", v.n_out.or(self.eig.n_out), v.n_in.or(self.eig.n_in));
        if v.surrogates.len() < 2 {
            p.push(
                "verify.surrogates",
                format!("needs at least two entries, got {}", v.surrogates.len()),
            );
        }
        for (i, s) in v.surrogates.iter().enumerate() {
            let field = format!("verify.surrogates[{i}]");
            match (s.epsilon, &s.network) {
                (Some(e), None) => {
                    if !(e >= 0.0 && e.is_finite()) {
                        p.push(&format!("{field}.epsilon"), "must be nonnegative and finite");
                    }
                }
                (None, Some(name)) => check_stem(p, &format!("{field}.network"), name),
                _ => p.push(&field, "give exactly one of epsilon or network"),
            }
        }
        match (&v.designs, &v.random_designs) {
            (Some(list), None) => {
                if list.is_empty() {
                    p.push("verify.designs", "is empty");
                }
                for (i, design) in list.iter().enumerate() {
                    let field = format!("verify.designs[{i}]");
                    if design.is_empty() {
                        p.push(&field, "is empty");
                    }
                    p.design(&field, design, d);
                }
            }
            (None, Some(rd)) => {
                p.at_least("verify.random_designs.count", Some(rd.count), 1);
                if rd.r == 0 || d.is_some_and(|d| rd.r > d) {
                    p.push(
                        "verify.random_designs.r",
                        format!("must lie in 1..={}", d.unwrap_or(rd.r)),
                    );
                }
            }
            (None, None) => p.push("verify.designs", "missing (or give verify.random_designs)"),
            (Some(_), Some(_)) => p.push("verify.designs", "give either designs or random_designs"),
        }
    }
}

fn check_stem(p: &mut Problems, field: &str, name: &str) {
    if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
        p.push(field, format!("'{name}' must be a plain file stem"));
    }
}
