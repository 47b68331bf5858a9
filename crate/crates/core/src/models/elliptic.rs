use nalgebra::DMatrix;

use super::stencil::Interior;
use super::{SensorLayout, SolveStats, Source};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{norm2, BandLu};

/// `−∇·(e^m ∇u) = f`, `u = 0` on the boundary, observed at the sensor nodes.
///
/// Face coefficients are the arithmetic mean of `e^m` at the two end nodes.
#[derive(Debug, Clone)]
pub struct EllipticModel {
    grid: Grid,
    layout: SensorLayout,
    source: Vec<f64>,
    interior: Interior,
    stats: SolveStats,
}

struct State {
    kappa: Vec<f64>,
    u: Vec<f64>,
    lu: BandLu,
}

impl EllipticModel {
    pub fn new(grid: Grid, layout: SensorLayout, source: &Source) -> Result<Self> {
        let interior = Interior::new(&grid)?;
        let source = source.nodal(&grid)?;
        if layout.node_index.iter().any(|&k| k >= grid.n()) {
            return Err(Error::InvalidArgument("sensor node outside grid".into()));
        }
        Ok(Self {
            grid,
            layout,
            source,
            interior,
            stats: SolveStats::default(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn layout(&self) -> &SensorLayout {
        &self.layout
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    fn solve(&self, m: &[f64]) -> Result<State> {
        let kappa: Vec<f64> = m.iter().map(|v| v.exp()).collect();
        if kappa.iter().any(|k| !k.is_finite() || *k == 0.0) {
            return Err(Error::NonFinite("diffusion coefficient e^m".into()));
        }
        let mut a = self.interior.empty_matrix();
        self.interior.add_diffusion(&mut a, |f| 0.5 * (kappa[f.p] + kappa[f.q]));
        let check = a.clone();
        let lu = a.factor()?;
        self.stats.factorization();
        self.stats.forward();
        let rhs = self.interior.restrict(&self.source);
        let u_int = lu.solve(&rhs);
        let resid: Vec<f64> = check.mul_vec(&u_int).iter().zip(&rhs).map(|(a, b)| a - b).collect();
        let r = norm2(&resid);
        if !r.is_finite() || r > 1e-8 * norm2(&rhs).max(1.0) {
            return Err(Error::Solver(format!("elliptic solve residual {r:e}")));
        }
        Ok(State {
            kappa,
            u: self.interior.prolong(&u_int, self.grid.n()),
            lu,
        })
    }

    /// Full nodal solution field.
    pub fn state(&self, m: &[f64]) -> Result<Vec<f64>> {
        Ok(self.solve(m)?.u)
    }

    pub fn evaluate(&self, m: &[f64]) -> Result<Vec<f64>> {
        Ok(self.layout.extract(&self.state(m)?))
    }

    // −∂(λᵀR)/∂m for an adjoint field λ (zero on the boundary).
    fn pullback(&self, st: &State, lambda: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.grid.n()];
        for f in self.interior.faces() {
            let t = 0.5 * f.inv_h2 * (st.u[f.p] - st.u[f.q]) * (lambda[f.p] - lambda[f.q]);
            g[f.p] -= st.kappa[f.p] * t;
            g[f.q] -= st.kappa[f.q] * t;
        }
        g
    }

    fn adjoint(&self, st: &State, weights: &[f64]) -> Vec<f64> {
        let mut rhs = vec![0.0; self.interior.len()];
        for (s, &k) in self.layout.node_index.iter().enumerate() {
            if let Some(u) = self.interior.unknown(k) {
                rhs[u] += weights[s];
            }
        }
        let lam = st.lu.solve_transpose(&rhs);
        self.stats.linearized(1);
        self.interior.prolong(&lam, self.grid.n())
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
            let lam = self.adjoint(&st, &e);
            e[s] = 0.0;
            for (j, v) in self.pullback(&st, &lam).into_iter().enumerate() {
                jac[(s, j)] = v;
            }
        }
        Ok(jac)
    }

    pub fn apply_jacobian(&self, m: &[f64], p: &[f64]) -> Result<Vec<f64>> {
        let st = self.solve(m)?;
        let mut rhs = vec![0.0; self.interior.len()];
        for f in self.interior.faces() {
            let dc = 0.5 * f.inv_h2 * (st.kappa[f.p] * p[f.p] + st.kappa[f.q] * p[f.q]);
            let flux = dc * (st.u[f.p] - st.u[f.q]);
            if let Some(up) = self.interior.unknown(f.p) {
                rhs[up] -= flux;
            }
            if let Some(uq) = self.interior.unknown(f.q) {
                rhs[uq] += flux;
            }
        }
        let du = st.lu.solve(&rhs);
        self.stats.linearized(1);
        Ok(self.layout.extract(&self.interior.prolong(&du, self.grid.n())))
    }

    pub fn apply_jacobian_transpose(&self, m: &[f64], q: &[f64]) -> Result<Vec<f64>> {
        let st = self.solve(m)?;
        let lam = self.adjoint(&st, q);
        Ok(self.pullback(&st, &lam))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sensors(grid: &Grid) -> SensorLayout {
        let pts = vec![(0.25, 0.25), (0.5, 0.5), (0.75, 0.25), (0.3, 0.8), (0.0, 0.5)];
        SensorLayout::from_coords(grid, pts).unwrap()
    }

    fn manufactured_error(nodes: usize) -> f64 {
        let grid = Grid::unit_square(nodes).unwrap();
        let f = grid.sample_fn(|x, y| 2.0 * PI * PI * (PI * x).sin() * (PI * y).sin());
        let layout = sensors(&grid);
        let model = EllipticModel::new(grid, layout.clone(), &Source::Nodal(f)).unwrap();
        let obs = model.evaluate(&vec![0.0; grid.n()]).unwrap();
        obs.iter()
            .zip(&layout.node_index)
            .map(|(o, &k)| {
                let (x, y) = grid.coords(k);
                (o - (PI * x).sin() * (PI * y).sin()).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn manufactured_solution_converges_at_second_order() {
        let e16 = manufactured_error(16);
        let e32 = manufactured_error(32);
        let e64 = manufactured_error(64);
        let ratio = e32 / e64;
        assert!((ratio - 4.0).abs() <= 0.6, "ratio {ratio}");
        for (a, b, ha, hb) in [(e16, e32, 15.0, 31.0), (e32, e64, 31.0, 63.0)] {
            let order = (a / b).ln() / (hb / ha as f64).ln();
            assert!((order - 2.0).abs() <= 0.3, "order {order}");
        }
    }

    #[test]
    fn zero_source_gives_zero_observations() {
        let grid = Grid::unit_square(10).unwrap();
        let model = EllipticModel::new(grid, sensors(&grid), &Source::Zero).unwrap();
        let m = grid.sample_fn(|x, y| x - 2.0 * y);
        assert!(model.evaluate(&m).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn boundary_sensor_has_zero_jacobian_row() {
        let grid = Grid::unit_square(8).unwrap();
        let model = EllipticModel::new(grid, sensors(&grid), &Source::Bump).unwrap();
        let jac = model.jacobian(&vec![0.1; grid.n()]).unwrap();
        assert!(jac.row(4).iter().all(|v| *v == 0.0));
        assert!(jac.row(1).iter().any(|v| *v != 0.0));
    }
}
