use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Dataset, DipNet};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Learning rate reached at the last epoch by geometric decay; constant if unset.
    pub final_learning_rate: Option<f64>,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Epochs without sufficient validation improvement before a stall is declared.
    pub patience: usize,
    /// Relative validation improvement that resets the stall counter.
    pub min_improvement: f64,
    /// Stop once stalled at maximum depth.
    pub early_stopping: bool,
    /// Start the output bias at the training-output mean.
    pub init_bias_from_mean: bool,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 500,
            batch_size: 32,
            learning_rate: 1e-3,
            final_learning_rate: None,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            patience: 20,
            min_improvement: 1e-3,
            early_stopping: true,
            init_bias_from_mean: true,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Step size used during `epoch`.
    pub fn learning_rate_at(&self, epoch: usize) -> f64 {
        match self.final_learning_rate {
            Some(end) if self.epochs > 1 => {
                let t = epoch as f64 / (self.epochs - 1) as f64;
                self.learning_rate * (end / self.learning_rate).powf(t)
            }
            _ => self.learning_rate,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.batch_size == 0 {
            bad.push("batch_size must be positive".to_string());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            bad.push(format!("learning rate {} must be positive", self.learning_rate));
        }
        if let Some(lr) = self.final_learning_rate {
            if !(lr > 0.0 && lr.is_finite()) {
                bad.push(format!("final learning rate {lr} must be positive"));
            }
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            bad.push("moment decay rates must lie in [0, 1)".to_string());
        }
        if !(self.epsilon > 0.0) {
            bad.push("epsilon must be positive".to_string());
        }
        if !(0.0..1.0).contains(&self.min_improvement) {
            bad.push("min_improvement must lie in [0, 1)".to_string());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(bad.join("; ")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean per-sample squared error on the training split, per epoch.
    pub train_loss: Vec<f64>,
    pub validation_loss: Vec<f64>,
    /// Validation loss before the first update.
    pub initial_validation_loss: f64,
    pub best_validation_loss: f64,
    /// `None` when no epoch improved on the initial weights.
    pub best_epoch: Option<usize>,
    pub epochs_run: usize,
    /// `(epoch, new depth)` for each appended layer.
    pub layer_additions: Vec<(usize, usize)>,
    pub final_depth: usize,
    pub seed: u64,
}

impl TrainReport {
    pub fn summary(&self) -> serde_json::Value {
        json!({
            "epochs_run": self.epochs_run,
            "best_epoch": self.best_epoch,
            "best_validation_loss": self.best_validation_loss,
            "final_depth": self.final_depth,
            "train_seed": self.seed,
        })
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn step(&mut self, params: &mut [f64], grad: &[f64], cfg: &TrainConfig, lr: f64) {
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t);
        let c2 = 1.0 - cfg.beta2.powi(self.t);
        for (((p, g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
            *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + cfg.epsilon);
        }
    }

    fn insert_zeros(&mut self, at: usize, len: usize) {
        self.m.splice(at..at, std::iter::repeat_n(0.0, len));
        self.v.splice(at..at, std::iter::repeat_n(0.0, len));
    }
}

fn mean_loss(net: &DipNet, z: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    if z.is_empty() {
        return f64::NAN;
    }
    let total: f64 = z.iter().zip(y).map(|(zi, yi)| net.loss_at(&net.params, zi, yi)).sum();
    total / z.len() as f64
}

/// Mini-batch training of the mean squared output error with adaptive depth.
///
/// The weights with the lowest validation loss seen (including the initial
/// weights) are restored at the end.
pub fn train(net: &mut DipNet, data: &Dataset, cfg: &TrainConfig) -> Result<TrainReport> {
    cfg.validate()?;
    if data.train.is_empty() {
        return Err(Error::InvalidArgument("training split is empty".into()));
    }
    if data.input_dim() != net.input_dim() || data.output_dim() != net.output_dim() {
        return Err(Error::Shape(format!(
            "dataset is {}→{}, net is {}→{}",
            data.input_dim(),
            data.output_dim(),
            net.input_dim(),
            net.output_dim()
        )));
    }
    let encode = |idx: &[usize]| -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let z = idx
            .iter()
            .map(|&i| net.encode(&data.inputs[i]))
            .collect::<Result<Vec<_>>>()?;
        Ok((z, data.subset_outputs(idx)))
    };
    let (z_train, y_train) = encode(&data.train)?;
    let (z_val, y_val) = encode(&data.validation)?;
    // Without a validation split, stalls are judged on the training loss.
    let (z_mon, y_mon) = if z_val.is_empty() {
        (&z_train, &y_train)
    } else {
        (&z_val, &y_val)
    };

    if cfg.init_bias_from_mean {
        let d = net.output_dim();
        let mut mean = vec![0.0; d];
        for y in &y_train {
            for (m, v) in mean.iter_mut().zip(y) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= y_train.len() as f64);
        net.set_output_bias(&mean)?;
    }

    let max_depth = net.config().max_depth().max(net.depth());
    let mut adam = Adam {
        m: vec![0.0; net.param_count()],
        v: vec![0.0; net.param_count()],
        t: 0,
    };
    let initial = mean_loss(net, z_mon, y_mon);
    if !initial.is_finite() {
        return Err(Error::NonFinite("initial validation loss".into()));
    }
    let mut best = (initial, net.params.clone(), net.depth());
    let mut best_epoch = None;
    let mut reference = initial;
    let mut stall = 0usize;
    let mut report = TrainReport {
        train_loss: Vec::new(),
        validation_loss: Vec::new(),
        initial_validation_loss: initial,
        best_validation_loss: initial,
        best_epoch: None,
        epochs_run: 0,
        layer_additions: Vec::new(),
        final_depth: net.depth(),
        seed: cfg.seed,
    };

    let mut order: Vec<usize> = (0..z_train.len()).collect();
    let mut grad = vec![0.0; net.param_count()];
    for epoch in 0..cfg.epochs {
        order.sort_unstable();
        order.shuffle(&mut stream_rng(cfg.seed, Stream::Training, epoch as u64));
        let lr = cfg.learning_rate_at(epoch);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grad.clear();
            grad.resize(net.param_count(), 0.0);
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                epoch_loss += net.accumulate_gradient(&net.params, &z_train[i], &y_train[i], scale, &mut grad);
            }
            if !epoch_loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFinite(format!("training loss at epoch {epoch}")));
            }
            adam.step(&mut net.params, &grad, cfg, lr);
        }
        let train_loss = epoch_loss / z_train.len() as f64;
        let val_loss = mean_loss(net, z_mon, y_mon);
        if !val_loss.is_finite() {
            return Err(Error::NonFinite(format!("validation loss at epoch {epoch}")));
        }
        report.train_loss.push(train_loss);
        report
            .validation_loss
            .push(if z_val.is_empty() { f64::NAN } else { val_loss });
        report.epochs_run = epoch + 1;

        if val_loss < best.0 {
            best = (val_loss, net.params.clone(), net.depth());
            best_epoch = Some(epoch);
        }
        if val_loss < reference * (1.0 - cfg.min_improvement) {
            reference = val_loss;
            stall = 0;
        } else {
            stall += 1;
        }
        if stall >= cfg.patience {
            if net.config().adaptive && net.depth() < max_depth {
                let at = net.append_layer();
                adam.insert_zeros(at, net.layer_block_len());
                report.layer_additions.push((epoch, net.depth()));
                stall = 0;
            } else if cfg.early_stopping {
                break;
            }
        }
    }

    let (best_loss, params, depth) = best;
    net.depth = depth;
    net.params = params;
    report.best_validation_loss = best_loss;
    report.best_epoch = best_epoch;
    report.final_depth = depth;
    net.set_training_summary(report.summary());
    Ok(report)
}
