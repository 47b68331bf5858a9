use std::path::Path;

use serde_json::json;

use crate::container::{meta_usize, Container};
use crate::error::{Error, Result};
use crate::models::Evaluator;
use crate::par::try_map_indexed;
use crate::prior::GaussianPrior;
use crate::rng::{stream_rng, Stream};

/// Prior samples and their observables, split into contiguous
/// train/validation/test ranges (test last).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

impl Dataset {
    /// Holds out the last `n_test` samples, then a `validation_fraction`
    /// share (rounded down) of the rest for validation.
    pub fn from_samples(
        inputs: Vec<Vec<f64>>,
        outputs: Vec<Vec<f64>>,
        n_test: usize,
        validation_fraction: f64,
    ) -> Result<Self> {
        if inputs.len() != outputs.len() {
            return Err(Error::Shape(format!(
                "{} inputs vs {} outputs",
                inputs.len(),
                outputs.len()
            )));
        }
        if !(0.0..1.0).contains(&validation_fraction) {
            return Err(Error::InvalidArgument(format!(
                "validation fraction {validation_fraction} not in [0, 1)"
            )));
        }
        let total = inputs.len();
        if n_test >= total {
            return Err(Error::InvalidArgument(format!(
                "{n_test} test samples leave nothing to train on out of {total}"
            )));
        }
        for (i, o) in outputs.iter().enumerate() {
            if o.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("output of sample {i}")));
            }
        }
        let rest = total - n_test;
        let n_val = ((rest as f64) * validation_fraction).floor() as usize;
        let n_train = rest - n_val;
        if n_train == 0 {
            return Err(Error::InvalidArgument("training split is empty".into()));
        }
        Ok(Self {
            inputs,
            outputs,
            train: (0..n_train).collect(),
            validation: (n_train..rest).collect(),
            test: (rest..total).collect(),
        })
    }

    /// Draws `n_samples` prior samples from the data stream and evaluates the map.
    pub fn generate(
        map: &dyn Evaluator,
        prior: &dyn GaussianPrior,
        n_samples: usize,
        n_test: usize,
        validation_fraction: f64,
        seed: u64,
    ) -> Result<Self> {
        if prior.dim() != map.input_dim() {
            return Err(Error::Shape(format!(
                "prior dim {} vs map input {}",
                prior.dim(),
                map.input_dim()
            )));
        }
        let inputs: Vec<Vec<f64>> = (0..n_samples)
            .map(|i| prior.sample(&mut stream_rng(seed, Stream::Data, i as u64)))
            .collect();
        let outputs = try_map_indexed(n_samples, |i| {
            map.evaluate(&inputs[i]).map_err(|e| Error::at_sample(i, e))
        })?;
        Self::from_samples(inputs, outputs, n_test, validation_fraction)
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.first().map_or(0, |v| v.len())
    }

    pub fn output_dim(&self) -> usize {
        self.outputs.first().map_or(0, |v| v.len())
    }

    pub fn subset_inputs(&self, idx: &[usize]) -> Vec<Vec<f64>> {
        idx.iter().map(|&i| self.inputs[i].clone()).collect()
    }

    pub fn subset_outputs(&self, idx: &[usize]) -> Vec<Vec<f64>> {
        idx.iter().map(|&i| self.outputs[i].clone()).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let (n, d, total) = (self.input_dim(), self.output_dim(), self.len());
        let meta = json!({
            "n": n,
            "d": d,
            "samples": total,
            "train": self.train.len(),
            "validation": self.validation.len(),
            "test": self.test.len(),
        });
        let mut c = Container::new("dataset", meta);
        c.push("inputs", total, n, self.inputs.concat());
        c.push("outputs", total, d, self.outputs.concat());
        c.save(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let c = Container::load(path, "dataset")?;
        let n = meta_usize(&c.meta, "n")?;
        let d = meta_usize(&c.meta, "d")?;
        let total = meta_usize(&c.meta, "samples")?;
        let n_train = meta_usize(&c.meta, "train")?;
        let n_val = meta_usize(&c.meta, "validation")?;
        let n_test = meta_usize(&c.meta, "test")?;
        if n_train + n_val + n_test != total || n_train == 0 {
            return Err(Error::Corrupt("dataset split sizes do not add up".into()));
        }
        let split = |data: &[f64], w: usize| -> Vec<Vec<f64>> {
            if w == 0 {
                vec![Vec::new(); total]
            } else {
                data.chunks_exact(w).map(|c| c.to_vec()).collect()
            }
        };
        let inputs = split(c.block_shaped("inputs", total, n)?, n);
        let outputs = split(c.block_shaped("outputs", total, d)?, d);
        Ok(Self {
            inputs,
            outputs,
            train: (0..n_train).collect(),
            validation: (n_train..n_train + n_val).collect(),
            test: (n_train + n_val..total).collect(),
        })
    }
}
