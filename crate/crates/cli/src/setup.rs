//! Builds the prior, forward map and noise model described by a validated config.

use dipoed::eig::NoiseModel;
use dipoed::models::{AdrModel, AdrParams, EllipticModel, LinearModel, ObservableMap, SensorLayout, Source};
use dipoed::{DenseGaussianPrior, GaussianFieldPrior, GaussianPrior, Grid, Result};
use nalgebra::DMatrix;

use crate::config::{ModelKind, RunConfig, ScalarOrVec};

pub enum Prior {
    Field(GaussianFieldPrior),
    Dense(DenseGaussianPrior),
}

impl Prior {
    pub fn as_dyn(&self) -> &dyn GaussianPrior {
        match self {
            Prior::Field(p) => p,
            Prior::Dense(p) => p,
        }
    }
}

pub fn grid(cfg: &RunConfig) -> Result<Grid> {
    let g = cfg.grid.as_ref().expect("validated: grid present");
    Grid::new(g.nx, g.ny.unwrap_or(g.nx), g.lx, g.ly)
}

pub fn prior(cfg: &RunConfig) -> Result<Prior> {
    let p = &cfg.prior;
    if cfg.model_kind() == Some(ModelKind::Linear) {
        let n = cfg.parameter_dim().expect("validated: linear matrix present");
        let mean = p.mean.as_ref().map_or(vec![0.0; n], |m| m.expand(n));
        let cov = match &p.covariance {
            Some(rows) => DMatrix::from_row_iterator(n, n, rows.iter().flatten().copied()),
            None => DMatrix::identity(n, n) * p.variance.unwrap_or(1.0),
        };
        return Ok(Prior::Dense(DenseGaussianPrior::new(mean, cov)?));
    }
    let grid = grid(cfg)?;
    let mean = p.mean.as_ref().map_or(vec![0.0; grid.n()], |m| m.expand(grid.n()));
    let (gamma, delta) = (p.gamma.expect("validated"), p.delta.expect("validated"));
    Ok(Prior::Field(GaussianFieldPrior::new(grid, gamma, delta, mean)?))
}

pub fn map(cfg: &RunConfig) -> Result<ObservableMap> {
    let m = cfg.model.as_ref().expect("validated: model present");
    if m.kind == ModelKind::Linear {
        let rows = m.matrix.as_ref().expect("validated");
        let (d, n) = (rows.len(), rows[0].len());
        let g = DMatrix::from_row_iterator(d, n, rows.iter().flatten().copied());
        let offset = m.offset.clone().unwrap_or_else(|| vec![0.0; d]);
        return Ok(ObservableMap::Linear(LinearModel::new(g, offset)?));
    }
    let grid = grid(cfg)?;
    let layout = SensorLayout::from_spec(&grid, m.sensors.as_ref().expect("validated"))?;
    let source = m.source.clone().unwrap_or(Source::Bump);
    Ok(match m.kind {
        ModelKind::Elliptic => ObservableMap::Elliptic(EllipticModel::new(grid, layout, &source)?),
        _ => {
            let base = AdrParams::default();
            let params = AdrParams {
                k: m.params.k.unwrap_or(base.k),
                v0: m.params.v0.unwrap_or(base.v0),
                reaction_scale: m.params.reaction_scale.unwrap_or(base.reaction_scale),
            };
            let mut adr = AdrModel::new(grid, layout, params, &source)?;
            if let Some(newton) = m.newton {
                adr = adr.with_newton(newton);
            }
            ObservableMap::Adr(adr)
        }
    })
}

pub fn noise(cfg: &RunConfig, d: usize) -> Result<NoiseModel> {
    match cfg.noise.sigma.as_ref().expect("validated: sigma present") {
        ScalarOrVec::Scalar(s) => NoiseModel::uniform(d, *s),
        ScalarOrVec::Vector(v) => NoiseModel::new(v.clone()),
    }
}
