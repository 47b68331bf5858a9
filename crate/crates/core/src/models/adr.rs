use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::stencil::Interior;
use super::{SensorLayout, SolveStats, Source};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{norm2, BandLu, BandMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdrParams {
    /// Diffusion coefficient.
    pub k: f64,
    /// Stream-function amplitude of the velocity field.
    pub v0: f64,
    /// Multiplier on the reaction term; 0 switches the reaction off.
    #[serde(default = "one")]
    pub reaction_scale: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for AdrParams {
    fn default() -> Self {
        Self {
            k: 0.01,
            v0: 30.0,
            reaction_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonSettings {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 50,
            max_halvings: 10,
        }
    }
}

/// `−∇·(k∇u) + v·∇u + e^m u³ = f`, `u = 0` on the boundary.
///
/// The velocity is `v = (∂ψ/∂y, −∂ψ/∂x)` for `ψ = v0 sin(πx/lx) sin(πy/ly)`;
/// advection is first-order upwind, diffusion the five-point stencil.
#[derive(Debug, Clone)]
pub struct AdrModel {
    grid: Grid,
    layout: SensorLayout,
    params: AdrParams,
    newton: NewtonSettings,
    source: Vec<f64>,
    interior: Interior,
    linear_part: BandMatrix,
    stats: SolveStats,
}

pub(crate) struct AdrState {
    pub u: Vec<f64>,
    pub reaction: Vec<f64>,
    pub lu: BandLu,
}

impl AdrModel {
    pub fn new(grid: Grid, layout: SensorLayout, params: AdrParams, source: &Source) -> Result<Self> {
        if !(params.k > 0.0) || !params.k.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "diffusion k must be positive, got {}",
                params.k
            )));
        }
        if !params.v0.is_finite() || !(params.reaction_scale >= 0.0) {
            return Err(Error::InvalidArgument("invalid velocity or reaction scale".into()));
        }
        let interior = Interior::new(&grid)?;
        let source = source.nodal(&grid)?;
        let mut a = interior.empty_matrix();
        interior.add_diffusion(&mut a, |_| params.k);
        let (hx, hy) = (grid.hx(), grid.hy());
        for u in 0..interior.len() {
            let k = interior.node(u);
            let (x, y) = grid.coords(k);
            let (vx, vy) = velocity(&grid, params.v0, x, y);
            let mut upwind = |v: f64, h: f64, back: usize, fwd: usize| {
                let c = v / h;
                if v > 0.0 {
                    a.add(u, u, c);
                    if let Some(q) = interior.unknown(back) {
                        a.add(u, q, -c);
                    }
                } else if v < 0.0 {
                    a.add(u, u, -c);
                    if let Some(q) = interior.unknown(fwd) {
                        a.add(u, q, c);
                    }
                }
            };
            upwind(vx, hx, k - 1, k + 1);
            upwind(vy, hy, k - grid.nx, k + grid.nx);
        }
        Ok(Self {
            grid,
            layout,
            params,
            newton: NewtonSettings::default(),
            source,
            interior,
            linear_part: a,
            stats: SolveStats::default(),
        })
    }

    pub fn with_newton(mut self, newton: NewtonSettings) -> Self {
        self.newton = newton;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn layout(&self) -> &SensorLayout {
        &self.layout
    }

    pub fn params(&self) -> &AdrParams {
        &self.params
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    /// Nodal velocity field `(vx, vy)`.
    pub fn velocity_field(&self) -> Vec<(f64, f64)> {
        (0..self.grid.n())
            .map(|k| {
                let (x, y) = self.grid.coords(k);
                velocity(&self.grid, self.params.v0, x, y)
            })
            .collect()
    }

    /// Interior reaction coefficients `s·e^m`.
    fn reaction(&self, m: &[f64]) -> Result<Vec<f64>> {
        let s = self.params.reaction_scale;
        let r: Vec<f64> = (0..self.interior.len())
            .map(|u| {
                if s == 0.0 {
                    0.0
                } else {
                    s * m[self.interior.node(u)].exp()
                }
            })
            .collect();
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("reaction coefficient e^m".into()));
        }
        Ok(r)
    }

    fn residual(&self, u: &[f64], reaction: &[f64], f: &[f64]) -> Vec<f64> {
        let mut r = self.linear_part.mul_vec(u);
        for i in 0..r.len() {
            r[i] += reaction[i] * u[i] * u[i] * u[i] - f[i];
        }
        r
    }

    fn linearization(&self, u: &[f64], reaction: &[f64]) -> BandMatrix {
        let mut j = self.linear_part.clone();
        let diag: Vec<f64> = u.iter().zip(reaction).map(|(u, c)| 3.0 * c * u * u).collect();
        j.add_diagonal(&diag);
        j
    }

    /// Damped Newton from `u = 0`; returns the interior state and the
    /// factorized linearization at the solution.
    pub(crate) fn solve(&self, m: &[f64]) -> Result<AdrState> {
        let reaction = self.reaction(m)?;
        let f = self.interior.restrict(&self.source);
        let tol = self.newton.tolerance * norm2(&f).max(1.0);
        let mut u = vec![0.0; self.interior.len()];
        let mut r = self.residual(&u, &reaction, &f);
        let mut rnorm = norm2(&r);
        let mut iterations = 0;
        while rnorm > tol {
            if iterations == self.newton.max_iterations {
                return Err(Error::NewtonDivergence {
                    iterations,
                    residual: rnorm,
                });
            }
            iterations += 1;
            let lu = self.linearization(&u, &reaction).factor()?;
            self.stats.factorization();
            let step = lu.solve(&r);
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..=self.newton.max_halvings {
                let trial: Vec<f64> = u.iter().zip(&step).map(|(a, s)| a - t * s).collect();
                let tr = self.residual(&trial, &reaction, &f);
                let tn = norm2(&tr);
                if tn.is_finite() && tn < rnorm {
                    accepted = Some((trial, tr, tn));
                    break;
                }
                t *= 0.5;
            }
            match accepted {
                Some((trial, tr, tn)) => {
                    u = trial;
                    r = tr;
                    rnorm = tn;
                }
                // no decrease along the Newton direction: residual is at roundoff level
                None if rnorm <= 1e3 * tol => break,
                None => {
                    return Err(Error::NewtonDivergence {
                        iterations,
                        residual: rnorm,
                    })
                }
            }
        }
        let lu = self.linearization(&u, &reaction).factor()?;
        self.stats.factorization();
        self.stats.forward();
        Ok(AdrState { u, reaction, lu })
    }

    /// Full nodal state field.
    pub fn state(&self, m: &[f64]) -> Result<Vec<f64>> {
        let st = self.solve(m)?;
        Ok(self.interior.prolong(&st.u, self.grid.n()))
    }

    pub fn evaluate(&self, m: &[f64]) -> Result<Vec<f64>> {
        Ok(self.layout.extract(&self.state(m)?))
    }

    fn sensor_rhs(&self, weights: &[f64]) -> Vec<f64> {
        let mut rhs = vec![0.0; self.interior.len()];
        for (s, &k) in self.layout.node_index.iter().enumerate() {
            if let Some(u) = self.interior.unknown(k) {
                rhs[u] += weights[s];
            }
        }
        rhs
    }

    // ∂R/∂m is diagonal on the interior: e^m u³ (times the reaction scale).
    fn pullback(&self, st: &AdrState, lambda: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.grid.n()];
        for (i, l) in lambda.iter().enumerate() {
            let u = st.u[i];
            g[self.interior.node(i)] = -l * st.reaction[i] * u * u * u;
        }
        g
    }

    pub fn jacobian(&self, m: &[f64]) -> Result<DMatrix<f64>> {
        let st = self.solve(m)?;
        let d = self.layout.len();
        let mut jac = DMatrix::zeros(d, self.grid.n());
        let mut e = vec![0.0; d];
        for s in 0..d {
            if self.interior.unknown(self.layout.node_index[s]).is_none() {
                continue;
            }
            e[s] = 1.0;
            let lam = st.lu.solve_transpose(&self.sensor_rhs(&e));
            e[s] = 0.0;
            self.stats.linearized(1);
            for (j, v) in self.pullback(&st, &lam).into_iter().enumerate() {
                jac[(s, j)] = v;
            }
        }
        Ok(jac)
    }

    pub fn apply_jacobian(&self, m: &[f64], p: &[f64]) -> Result<Vec<f64>> {
        let st = self.solve(m)?;
        let rhs: Vec<f64> = (0..self.interior.len())
            .map(|i| -st.reaction[i] * st.u[i].powi(3) * p[self.interior.node(i)])
            .collect();
        let du = st.lu.solve(&rhs);
        self.stats.linearized(1);
        Ok(self.layout.extract(&self.interior.prolong(&du, self.grid.n())))
    }

    pub fn apply_jacobian_transpose(&self, m: &[f64], q: &[f64]) -> Result<Vec<f64>> {
        let st = self.solve(m)?;
        let lam = st.lu.solve_transpose(&self.sensor_rhs(q));
        self.stats.linearized(1);
        Ok(self.pullback(&st, &lam))
    }

    /// Residual norm of a nodal field (boundary ignored).
    pub fn residual_norm(&self, m: &[f64], field: &[f64]) -> Result<f64> {
        let reaction = self.reaction(m)?;
        let f = self.interior.restrict(&self.source);
        Ok(norm2(&self.residual(&self.interior.restrict(field), &reaction, &f)))
    }

    /// Linear part (diffusion + upwind advection) over the interior unknowns.
    #[cfg(test)]
    pub(crate) fn linear_part(&self) -> &BandMatrix {
        &self.linear_part
    }
}

fn velocity(grid: &Grid, v0: f64, x: f64, y: f64) -> (f64, f64) {
    let (ax, ay) = (PI / grid.lx, PI / grid.ly);
    (
        v0 * ay * (ax * x).sin() * (ay * y).cos(),
        -v0 * ax * (ax * x).cos() * (ay * y).sin(),
    )
}
