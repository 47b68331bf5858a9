//! WebAssembly bindings for the browser demo in `www/`.

pub mod demo;

use demo::{DemoProblem, DemoSettings};
use wasm_bindgen::prelude::*;

fn js_err(e: dipoed::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Demo {
    inner: DemoProblem,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(nodes: usize, gamma: f64, delta: f64, v0: f64, sensors: usize) -> Result<Demo, JsError> {
        let inner = DemoProblem::new(DemoSettings {
            nodes,
            gamma,
            delta,
            v0,
            sensors,
        })
        .map_err(js_err)?;
        Ok(Demo { inner })
    }

    pub fn nodes(&self) -> usize {
        self.inner.nodes()
    }

    #[wasm_bindgen(js_name = sensorNodes)]
    pub fn sensor_nodes(&self) -> Vec<u32> {
        self.inner.sensor_nodes().iter().map(|&k| k as u32).collect()
    }

    #[wasm_bindgen(js_name = samplePrior)]
    pub fn sample_prior(&self, seed: u32) -> Vec<f64> {
        self.inner.sample_prior(seed as u64)
    }

    pub fn solve(&self, field: &[f64]) -> Result<Vec<f64>, JsError> {
        self.inner.solve(field).map_err(js_err)
    }

    /// Greedy sensor choice; returns `[i_1, eig_1, i_2, eig_2, ...]`.
    pub fn select(&self, field: &[f64], sigma: f64, r: usize) -> Result<Vec<f64>, JsError> {
        let s = self.inner.select(field, sigma, r).map_err(js_err)?;
        Ok(s.indices
            .iter()
            .zip(&s.per_step_eig)
            .flat_map(|(&i, &e)| [i as f64, e])
            .collect())
    }
}
