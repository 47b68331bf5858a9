//! The demo problem, independent of the JavaScript bindings.

use dipoed::design::greedy_select;
use dipoed::eig::{eig_closed_form_linear_gaussian, NoiseModel};
use dipoed::models::{AdrModel, AdrParams, SensorLayout, SensorSpec, Source};
use dipoed::rng::{stream_rng, Stream};
use dipoed::{Error, GaussianFieldPrior, GaussianPrior, Grid, Result};
use nalgebra::{DMatrix, SymmetricEigen};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemoSettings {
    pub nodes: usize,
    pub gamma: f64,
    pub delta: f64,
    pub v0: f64,
    /// Sensors per axis of the square candidate lattice.
    pub sensors: usize,
}

impl Default for DemoSettings {
    fn default() -> Self {
        Self {
            nodes: 16,
            gamma: 0.1,
            delta: 1.0,
            v0: 1.0,
            sensors: 5,
        }
    }
}

/// Sensors picked by the greedy pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub indices: Vec<usize>,
    pub per_step_eig: Vec<f64>,
}

pub struct DemoProblem {
    prior: GaussianFieldPrior,
    model: AdrModel,
}

impl DemoProblem {
    pub fn new(s: DemoSettings) -> Result<Self> {
        if s.sensors == 0 {
            return Err(Error::InvalidArgument(
                "at least one sensor per axis is required".into(),
            ));
        }
        let grid = Grid::unit_square(s.nodes)?;
        let prior = GaussianFieldPrior::zero_mean(grid.clone(), s.gamma, s.delta)?;
        let step = 1.0 / s.sensors as f64;
        let spec = SensorSpec::Grid {
            x0: 0.5 * step,
            y0: 0.5 * step,
            dx: step,
            dy: step,
            count_x: s.sensors,
            count_y: s.sensors,
        };
        let layout = SensorLayout::from_spec(&grid, &spec)?;
        let params = AdrParams {
            v0: s.v0,
            ..AdrParams::default()
        };
        let model = AdrModel::new(grid, layout, params, &Source::Bump)?;
        Ok(Self { prior, model })
    }

    pub fn nodes(&self) -> usize {
        self.model.grid().nx
    }

    pub fn sensor_nodes(&self) -> &[usize] {
        &self.model.layout().node_index
    }

    pub fn sample_prior(&self, seed: u64) -> Vec<f64> {
        self.prior.sample(&mut stream_rng(seed, Stream::PriorSamples, 0))
    }

    fn check_field(&self, m: &[f64]) -> Result<()> {
        let n = self.prior.dim();
        if m.len() != n {
            return Err(Error::Shape(format!("field has length {}, expected {n}", m.len())));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field".into()));
        }
        Ok(())
    }

    /// Steady concentration for the log-diffusivity field `m`.
    pub fn solve(&self, m: &[f64]) -> Result<Vec<f64>> {
        self.check_field(m)?;
        self.model.state(m)
    }

    /// Greedy selection of `r` sensors for the model linearized at `m`.
    pub fn select(&self, m: &[f64], sigma: f64, r: usize) -> Result<Selection> {
        self.check_field(m)?;
        let j = self.model.jacobian(m)?;
        let d = j.nrows();
        // the EIG only sees G Γ Gᵀ, so a d×d square root of it stands in for G
        let mut g = DMatrix::zeros(d, j.ncols());
        for (i, row) in j.row_iter().enumerate() {
            let lt = self.prior.apply_factor_transpose(row.transpose().as_slice());
            g.row_mut(i).copy_from_slice(&lt);
        }
        let gram = &g * g.transpose();
        let eig = SymmetricEigen::new(gram);
        let root = &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
        let identity = DMatrix::identity(d, d);
        let noise = NoiseModel::uniform(d, sigma)?;
        let res = greedy_select(
            |s: &[usize]| eig_closed_form_linear_gaussian(&root, &identity, &noise, s),
            d,
            r,
        )?;
        Ok(Selection {
            indices: res.design.indices,
            per_step_eig: res.per_step_eig,
        })
    }
}
