//! Projected low-rank residual network surrogate
//! `F̃(m) = Φ · R · f_r(Vᵀm) + b`.
//!
//! `R` is a trainable restriction used only when the latent width differs
//! from the number of output basis vectors.

mod dataset;
mod train;

use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

pub use dataset::Dataset;
pub use train::{train, TrainConfig, TrainReport};

use crate::container::{meta_usize, Container};
use crate::error::{Error, Result};
use crate::models::Evaluator;
use crate::prior::GaussianPrior;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    Tanh,
}

impl Activation {
    pub fn name(&self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
        }
    }

    fn parse(name: &str) -> Result<Self> {
        match name {
            "tanh" => Ok(Activation::Tanh),
            other => Err(Error::Corrupt(format!("unknown activation '{other}'"))),
        }
    }

    #[inline]
    fn eval(&self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
        }
    }

    /// Derivative expressed through the activation value.
    #[inline]
    fn derivative_from_value(&self, s: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - s * s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipNetConfig {
    pub breadth: usize,
    /// Initial number of residual layers.
    pub depth: usize,
    pub layer_rank: usize,
    #[serde(default)]
    pub activation: Activation,
    #[serde(default)]
    pub adaptive: bool,
    /// Upper bound on the depth reached by adaptive training.
    #[serde(default)]
    pub max_depth: Option<usize>,
}

impl DipNetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layer_rank == 0 || self.layer_rank >= self.breadth {
            return Err(Error::InvalidArgument(format!(
                "layer rank {} must satisfy 1 <= k < breadth {}",
                self.layer_rank, self.breadth
            )));
        }
        if self.depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        if self.max_depth() < self.depth {
            return Err(Error::InvalidArgument(format!(
                "max depth {} below initial depth {}",
                self.max_depth(),
                self.depth
            )));
        }
        Ok(())
    }

    pub fn max_depth(&self) -> usize {
        if self.adaptive {
            self.max_depth.unwrap_or(self.depth)
        } else {
            self.depth
        }
    }
}

/// Encoder that maps `m` to whitened active-subspace coordinates: with `V`
/// orthonormal in the prior-precision inner product, `(Γ_pr⁻¹V)ᵀ(m − m_pr)`
/// is standard normal under the prior.
pub fn whitened_encoder(v: &DMatrix<f64>, prior: &dyn GaussianPrior) -> Result<DMatrix<f64>> {
    if v.nrows() != prior.dim() {
        return Err(Error::Shape(format!(
            "basis has {} rows, prior dim {}",
            v.nrows(),
            prior.dim()
        )));
    }
    let mut e = DMatrix::zeros(v.nrows(), v.ncols());
    for (j, col) in v.column_iter().enumerate() {
        let p = prior.apply_precision(col.as_slice());
        e.column_mut(j).copy_from_slice(&p);
    }
    Ok(e)
}

/// Per-sample intermediate values kept for backpropagation.
struct Trace {
    /// `z_0 … z_L`
    z: Vec<Vec<f64>>,
    /// activation values per layer
    s: Vec<Vec<f64>>,
    out: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DipNet {
    config: DipNetConfig,
    /// `n × r` encoder, row-major.
    v: Vec<f64>,
    /// `d × r_out` decoder, row-major.
    phi: Vec<f64>,
    n: usize,
    d: usize,
    r_out: usize,
    depth: usize,
    /// `[layer_0 … layer_{L-1}, restriction?, output_bias]`, each layer
    /// `[w1 (k×r), w2 (r×k), b (k)]` in row-major order.
    params: Vec<f64>,
    seed: u64,
    training: Option<serde_json::Value>,
}

fn glorot(rng: &mut impl Rng, fan_in: usize, fan_out: usize, count: usize) -> Vec<f64> {
    let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
    (0..count).map(|_| rng.random_range(-a..a)).collect()
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

impl DipNet {
    /// Builds a net with Glorot-uniform initial layers, identity restriction
    /// and zero output bias.
    pub fn new(config: DipNetConfig, encoder: &DMatrix<f64>, decoder: &DMatrix<f64>, seed: u64) -> Result<Self> {
        config.validate()?;
        let r = config.breadth;
        if encoder.ncols() != r {
            return Err(Error::Shape(format!(
                "encoder has {} columns, breadth is {r}",
                encoder.ncols()
            )));
        }
        if decoder.ncols() == 0 {
            return Err(Error::Shape("decoder has no columns".into()));
        }
        let mut net = Self::zeroed(
            config.clone(),
            row_major(encoder),
            row_major(decoder),
            encoder.nrows(),
            decoder.nrows(),
            decoder.ncols(),
            seed,
        );
        for layer in 0..config.depth {
            let (w1, w2) = net.initial_layer_weights(layer);
            let off = net.layer_offset(layer);
            let (k, r) = (net.k(), net.r());
            net.params[off..off + k * r].copy_from_slice(&w1);
            net.params[off + k * r..off + 2 * k * r].copy_from_slice(&w2);
        }
        Ok(net)
    }

    fn zeroed(config: DipNetConfig, v: Vec<f64>, phi: Vec<f64>, n: usize, d: usize, r_out: usize, seed: u64) -> Self {
        let depth = config.depth;
        let mut net = Self {
            config,
            v,
            phi,
            n,
            d,
            r_out,
            depth,
            params: Vec::new(),
            seed,
            training: None,
        };
        net.params = vec![0.0; net.param_count()];
        if net.has_restriction() {
            let off = net.restriction_offset();
            let r = net.r();
            for i in 0..r_out.min(r) {
                net.params[off + i * r + i] = 1.0;
            }
        }
        net
    }

    fn initial_layer_weights(&self, layer: usize) -> (Vec<f64>, Vec<f64>) {
        let (k, r) = (self.k(), self.r());
        let mut rng = stream_rng(self.seed, Stream::Init, layer as u64);
        let w1 = glorot(&mut rng, r, k, k * r);
        let w2 = glorot(&mut rng, k, r, r * k);
        (w1, w2)
    }

    pub fn config(&self) -> &DipNetConfig {
        &self.config
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.config.breadth
    }

    pub fn k(&self) -> usize {
        self.config.layer_rank
    }

    pub fn r_out(&self) -> usize {
        self.r_out
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn has_restriction(&self) -> bool {
        self.r_out != self.config.breadth
    }

    pub fn training_summary(&self) -> Option<&serde_json::Value> {
        self.training.as_ref()
    }

    pub fn set_training_summary(&mut self, summary: serde_json::Value) {
        self.training = Some(summary);
    }

    pub fn encoder(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.r(), &self.v)
    }

    pub fn decoder(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.d, self.r_out, &self.phi)
    }

    fn layer_len(&self) -> usize {
        2 * self.k() * self.r() + self.k()
    }

    fn layer_offset(&self, layer: usize) -> usize {
        layer * self.layer_len()
    }

    fn restriction_offset(&self) -> usize {
        self.depth * self.layer_len()
    }

    fn bias_offset(&self) -> usize {
        self.restriction_offset()
            + if self.has_restriction() {
                self.r_out * self.r()
            } else {
                0
            }
    }

    pub fn param_count(&self) -> usize {
        self.bias_offset() + self.d
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn output_bias(&self) -> &[f64] {
        &self.params[self.bias_offset()..]
    }

    pub fn set_output_bias(&mut self, b: &[f64]) -> Result<()> {
        if b.len() != self.d {
            return Err(Error::Shape(format!("bias length {} vs d {}", b.len(), self.d)));
        }
        let off = self.bias_offset();
        self.params[off..].copy_from_slice(b);
        Ok(())
    }

    /// `(w1, w2, b)` of one layer as row-major slices.
    pub fn layer(&self, i: usize) -> (&[f64], &[f64], &[f64]) {
        let (k, r) = (self.k(), self.r());
        let off = self.layer_offset(i);
        let p = &self.params[off..off + self.layer_len()];
        (&p[..k * r], &p[k * r..2 * k * r], &p[2 * k * r..])
    }

    pub fn layer_mut(&mut self, i: usize) -> (&mut [f64], &mut [f64], &mut [f64]) {
        let (k, r) = (self.k(), self.r());
        let off = self.layer_offset(i);
        let len = self.layer_len();
        let p = &mut self.params[off..off + len];
        let (w1, rest) = p.split_at_mut(k * r);
        let (w2, b) = rest.split_at_mut(r * k);
        (w1, w2, b)
    }

    /// Appends a residual layer that leaves the map unchanged: `w2 = 0`,
    /// `b = 0`, and a Glorot-drawn `w1` so the layer can start learning.
    /// Returns the offset of the new parameter block.
    pub fn append_layer(&mut self) -> usize {
        let (w1, _) = self.initial_layer_weights(self.depth);
        let off = self.restriction_offset();
        let mut block = vec![0.0; self.layer_len()];
        block[..w1.len()].copy_from_slice(&w1);
        self.params.splice(off..off, block);
        self.depth += 1;
        off
    }

    /// Appends a layer whose parameters are all zero.
    pub fn append_zero_layer(&mut self) {
        let off = self.append_layer();
        let len = self.layer_len();
        self.params[off..off + len].fill(0.0);
    }

    pub fn layer_block_len(&self) -> usize {
        self.layer_len()
    }

    /// `z₀ = Vᵀm`
    pub fn encode(&self, m: &[f64]) -> Result<Vec<f64>> {
        if m.len() != self.n {
            return Err(Error::Shape(format!(
                "input has length {}, expected {}",
                m.len(),
                self.n
            )));
        }
        let r = self.r();
        let mut z = vec![0.0; r];
        for (row, &mi) in self.v.chunks_exact(r).zip(m) {
            if mi != 0.0 {
                for (zj, vj) in z.iter_mut().zip(row) {
                    *zj += vj * mi;
                }
            }
        }
        Ok(z)
    }

    pub fn forward(&self, m: &[f64]) -> Result<Vec<f64>> {
        let z0 = self.encode(m)?;
        Ok(self.forward_latent_with(&self.params, &z0))
    }

    /// Forward pass from latent coordinates.
    pub fn forward_latent(&self, z0: &[f64]) -> Vec<f64> {
        self.forward_latent_with(&self.params, z0)
    }

    fn forward_latent_with(&self, params: &[f64], z0: &[f64]) -> Vec<f64> {
        self.trace(params, z0, false).out
    }

    fn trace(&self, params: &[f64], z0: &[f64], keep: bool) -> Trace {
        let (k, r) = (self.k(), self.r());
        let act = self.config.activation;
        let mut zs = Vec::with_capacity(if keep { self.depth + 1 } else { 0 });
        let mut ss = Vec::with_capacity(if keep { self.depth } else { 0 });
        let mut z = z0.to_vec();
        let mut s = vec![0.0; k];
        for layer in 0..self.depth {
            let off = self.layer_offset(layer);
            let w1 = &params[off..off + k * r];
            let w2 = &params[off + k * r..off + 2 * k * r];
            let b = &params[off + 2 * k * r..off + 2 * k * r + k];
            for (a, (row, bi)) in s.iter_mut().zip(w1.chunks_exact(r).zip(b)) {
                let mut acc = *bi;
                for (w, zj) in row.iter().zip(&z) {
                    acc += w * zj;
                }
                *a = act.eval(acc);
            }
            if keep {
                zs.push(z.clone());
            }
            for (zi, row) in z.iter_mut().zip(w2.chunks_exact(k)) {
                let mut acc = 0.0;
                for (w, si) in row.iter().zip(&s) {
                    acc += w * si;
                }
                *zi += acc;
            }
            if keep {
                ss.push(s.clone());
            }
        }
        let u = if self.has_restriction() {
            let off = self.restriction_offset();
            let rm = &params[off..off + self.r_out * r];
            rm.chunks_exact(r)
                .map(|row| row.iter().zip(&z).map(|(a, b)| a * b).sum())
                .collect()
        } else {
            z.clone()
        };
        let bias = &params[self.bias_offset()..];
        let out = self
            .phi
            .chunks_exact(self.r_out)
            .zip(bias)
            .map(|(row, bi)| bi + row.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        if keep {
            zs.push(z);
        }
        Trace { z: zs, s: ss, out }
    }

    /// Adds `∂/∂θ ‖F̃ − y‖²` into `grad` and returns the loss.
    pub(crate) fn accumulate_gradient(
        &self,
        params: &[f64],
        z0: &[f64],
        y: &[f64],
        scale: f64,
        grad: &mut [f64],
    ) -> f64 {
        let (k, r) = (self.k(), self.r());
        let act = self.config.activation;
        let t = self.trace(params, z0, true);
        let g_out: Vec<f64> = t.out.iter().zip(y).map(|(o, yi)| 2.0 * (o - yi)).collect();
        let loss: f64 = g_out.iter().map(|g| 0.25 * g * g).sum();

        let boff = self.bias_offset();
        for (gb, go) in grad[boff..].iter_mut().zip(&g_out) {
            *gb += scale * go;
        }
        // g_u = Φᵀ g_out
        let mut g_u = vec![0.0; self.r_out];
        for (row, go) in self.phi.chunks_exact(self.r_out).zip(&g_out) {
            for (gu, p) in g_u.iter_mut().zip(row) {
                *gu += p * go;
            }
        }
        let z_last = &t.z[self.depth];
        let mut g_z = if self.has_restriction() {
            let off = self.restriction_offset();
            let rm = &params[off..off + self.r_out * r];
            let mut g_z = vec![0.0; r];
            for (i, gu) in g_u.iter().enumerate() {
                let grow = &mut grad[off + i * r..off + (i + 1) * r];
                for (g, zj) in grow.iter_mut().zip(z_last) {
                    *g += scale * gu * zj;
                }
                for (gz, w) in g_z.iter_mut().zip(&rm[i * r..(i + 1) * r]) {
                    *gz += w * gu;
                }
            }
            g_z
        } else {
            g_u
        };

        let mut g_a = vec![0.0; k];
        for layer in (0..self.depth).rev() {
            let off = self.layer_offset(layer);
            let w1 = &params[off..off + k * r];
            let w2 = &params[off + k * r..off + 2 * k * r];
            let s = &t.s[layer];
            let z = &t.z[layer];
            // w2 gradient and g_s = w2ᵀ g_z
            for v in g_a.iter_mut() {
                *v = 0.0;
            }
            for (i, gz) in g_z.iter().enumerate() {
                let gw2 = &mut grad[off + k * r + i * k..off + k * r + (i + 1) * k];
                for (g, sj) in gw2.iter_mut().zip(s) {
                    *g += scale * gz * sj;
                }
                for (ga, w) in g_a.iter_mut().zip(&w2[i * k..(i + 1) * k]) {
                    *ga += w * gz;
                }
            }
            for (ga, sj) in g_a.iter_mut().zip(s) {
                *ga *= act.derivative_from_value(*sj);
            }
            for (a, ga) in g_a.iter().enumerate() {
                let gw1 = &mut grad[off + a * r..off + (a + 1) * r];
                for (g, zj) in gw1.iter_mut().zip(z) {
                    *g += scale * ga * zj;
                }
                grad[off + 2 * k * r + a] += scale * ga;
                for (gz, w) in g_z.iter_mut().zip(&w1[a * r..(a + 1) * r]) {
                    *gz += w * ga;
                }
            }
        }
        loss
    }

    /// Loss `‖F̃(m) − y‖²` and its parameter gradient.
    pub fn loss_gradient(&self, m: &[f64], y: &[f64]) -> Result<(f64, Vec<f64>)> {
        if y.len() != self.d {
            return Err(Error::Shape(format!(
                "target has length {}, expected {}",
                y.len(),
                self.d
            )));
        }
        let z0 = self.encode(m)?;
        let mut grad = vec![0.0; self.params.len()];
        let loss = self.accumulate_gradient(&self.params, &z0, y, 1.0, &mut grad);
        Ok((loss, grad))
    }

    fn loss_at(&self, params: &[f64], z0: &[f64], y: &[f64]) -> f64 {
        self.forward_latent_with(params, z0)
            .iter()
            .zip(y)
            .map(|(o, t)| (o - t) * (o - t))
            .sum()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_container().save(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_container(&Container::load(path, "dipnet")?)
    }

    pub fn to_container(&self) -> Container {
        let (k, r) = (self.k(), self.r());
        let meta = json!({
            "n": self.n,
            "d": self.d,
            "r": r,
            "r_out": self.r_out,
            "depth": self.depth,
            "layer_rank": k,
            "activation": self.config.activation.name(),
            "adaptive": self.config.adaptive,
            "max_depth": self.config.max_depth(),
            "seed": self.seed,
            "training": self.training.clone().unwrap_or(serde_json::Value::Null),
        });
        let mut c = Container::new("dipnet", meta);
        c.push("V", self.n, r, self.v.clone());
        c.push("Phi", self.d, self.r_out, self.phi.clone());
        for i in 0..self.depth {
            let (w1, w2, b) = self.layer(i);
            c.push(&format!("layer{i}.w1"), k, r, w1.to_vec());
            c.push(&format!("layer{i}.w2"), r, k, w2.to_vec());
            c.push(&format!("layer{i}.b"), 1, k, b.to_vec());
        }
        if self.has_restriction() {
            let off = self.restriction_offset();
            c.push(
                "restriction",
                self.r_out,
                r,
                self.params[off..off + self.r_out * r].to_vec(),
            );
        }
        c.push("output_bias", 1, self.d, self.output_bias().to_vec());
        c
    }

    pub fn from_container(c: &Container) -> Result<Self> {
        let meta = &c.meta;
        let n = meta_usize(meta, "n")?;
        let d = meta_usize(meta, "d")?;
        let r = meta_usize(meta, "r")?;
        let r_out = meta_usize(meta, "r_out")?;
        let depth = meta_usize(meta, "depth")?;
        let k = meta_usize(meta, "layer_rank")?;
        let max_depth = meta_usize(meta, "max_depth")?;
        let seed = meta
            .get("seed")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Corrupt("header field 'seed' missing".into()))?;
        let activation = Activation::parse(
            meta.get("activation")
                .and_then(|v| v.as_str())
                .ok_or_else(|| Error::Corrupt("header field 'activation' missing".into()))?,
        )?;
        let adaptive = meta.get("adaptive").and_then(|v| v.as_bool()).unwrap_or(false);
        let config = DipNetConfig {
            breadth: r,
            depth,
            layer_rank: k,
            activation,
            adaptive,
            max_depth: adaptive.then_some(max_depth.max(depth)),
        };
        config
            .validate()
            .map_err(|e| Error::Corrupt(format!("invalid net header: {e}")))?;
        if r_out == 0 {
            return Err(Error::Corrupt("r_out must be positive".into()));
        }
        let v = c.block_shaped("V", n, r)?.to_vec();
        let phi = c.block_shaped("Phi", d, r_out)?.to_vec();
        let mut net = Self::zeroed(config, v, phi, n, d, r_out, seed);
        for i in 0..depth {
            let w1 = c.block_shaped(&format!("layer{i}.w1"), k, r)?.to_vec();
            let w2 = c.block_shaped(&format!("layer{i}.w2"), r, k)?.to_vec();
            let b = c.block_shaped(&format!("layer{i}.b"), 1, k)?.to_vec();
            let (a1, a2, ab) = net.layer_mut(i);
            a1.copy_from_slice(&w1);
            a2.copy_from_slice(&w2);
            ab.copy_from_slice(&b);
        }
        if net.has_restriction() {
            let rm = c.block_shaped("restriction", r_out, r)?.to_vec();
            let off = net.restriction_offset();
            net.params[off..off + r_out * r].copy_from_slice(&rm);
        }
        let bias = c.block_shaped("output_bias", 1, d)?.to_vec();
        net.set_output_bias(&bias)?;
        net.training = meta.get("training").filter(|v| !v.is_null()).cloned();
        Ok(net)
    }
}

impl Evaluator for DipNet {
    fn input_dim(&self) -> usize {
        self.n
    }

    fn output_dim(&self) -> usize {
        self.d
    }

    fn evaluate(&self, m: &[f64]) -> Result<Vec<f64>> {
        self.forward(m)
    }

    fn solves_per_evaluation(&self) -> u64 {
        0
    }

    fn kind(&self) -> &'static str {
        "dipnet"
    }
}

/// Compares the backpropagated directional derivative of
/// `θ ↦ ‖F̃(m; θ) − y‖²` with a central difference of step `1e-6`.
/// Returns the relative discrepancy.
pub fn gradient_check(net: &DipNet, m: &[f64], y: &[f64], direction: &[f64]) -> Result<f64> {
    if direction.len() != net.params.len() {
        return Err(Error::Shape(format!(
            "direction has length {}, net has {} parameters",
            direction.len(),
            net.params.len()
        )));
    }
    let (_, grad) = net.loss_gradient(m, y)?;
    let z0 = net.encode(m)?;
    let analytic: f64 = grad.iter().zip(direction).map(|(g, p)| g * p).sum();
    let h = 1e-6;
    let shifted = |sign: f64| -> Vec<f64> {
        net.params
            .iter()
            .zip(direction)
            .map(|(t, p)| t + sign * h * p)
            .collect()
    };
    let fd = (net.loss_at(&shifted(1.0), &z0, y) - net.loss_at(&shifted(-1.0), &z0, y)) / (2.0 * h);
    let scale = analytic.abs().max(fd.abs());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((analytic - fd).abs() / scale)
}

/// `100 (1 − ‖F̃ − F‖ / ‖F‖)` with both norms stacked over all samples.
pub fn l2_accuracy(surrogate: &dyn Evaluator, map: &dyn Evaluator, inputs: &[Vec<f64>]) -> Result<f64> {
    if inputs.is_empty() {
        return Err(Error::InvalidArgument("accuracy needs a nonempty test set".into()));
    }
    let mut truth = Vec::with_capacity(inputs.len());
    let mut pred = Vec::with_capacity(inputs.len());
    for (i, m) in inputs.iter().enumerate() {
        truth.push(map.evaluate(m).map_err(|e| Error::at_sample(i, e))?);
        pred.push(surrogate.evaluate(m).map_err(|e| Error::at_sample(i, e))?);
    }
    l2_accuracy_of(&pred, &truth)
}

/// Accuracy from precomputed predictions and reference outputs.
pub fn l2_accuracy_of(predicted: &[Vec<f64>], truth: &[Vec<f64>]) -> Result<f64> {
    if predicted.len() != truth.len() || predicted.is_empty() {
        return Err(Error::Shape(
            "prediction and truth sets differ in size or are empty".into(),
        ));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (p, t) in predicted.iter().zip(truth) {
        if p.len() != t.len() {
            return Err(Error::Shape("prediction and truth lengths differ".into()));
        }
        for (a, b) in p.iter().zip(t) {
            num += (a - b) * (a - b);
            den += b * b;
        }
    }
    if den == 0.0 {
        return Err(Error::InvalidArgument("reference outputs have zero norm".into()));
    }
    Ok(100.0 * (1.0 - (num / den).sqrt()))
}
