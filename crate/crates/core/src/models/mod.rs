//! Parameter-to-observable maps at all candidate sensors.

mod adr;
mod elliptic;
mod linear;
mod stencil;

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use adr::{AdrModel, AdrParams, NewtonSettings};
pub use elliptic::EllipticModel;
pub use linear::LinearModel;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Anything that maps a parameter vector to full-candidate observables.
pub trait Evaluator: Send + Sync {
    fn input_dim(&self) -> usize;

    fn output_dim(&self) -> usize;

    fn evaluate(&self, m: &[f64]) -> Result<Vec<f64>>;

    /// [`Evaluator::evaluate`] into a reused buffer.
    fn evaluate_into(&self, m: &[f64], out: &mut Vec<f64>) -> Result<()> {
        *out = self.evaluate(m)?;
        Ok(())
    }

    /// PDE solves consumed by one call to [`Evaluator::evaluate`].
    fn solves_per_evaluation(&self) -> u64;

    fn kind(&self) -> &'static str;
}

/// Candidate sensor placement rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SensorSpec {
    Grid {
        x0: f64,
        y0: f64,
        dx: f64,
        dy: f64,
        count_x: usize,
        count_y: usize,
    },
    Points(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorLayout {
    pub coords: Vec<(f64, f64)>,
    pub node_index: Vec<usize>,
}

impl SensorLayout {
    pub fn from_spec(grid: &Grid, spec: &SensorSpec) -> Result<Self> {
        let coords = match spec {
            SensorSpec::Grid {
                x0,
                y0,
                dx,
                dy,
                count_x,
                count_y,
            } => {
                let mut c = Vec::with_capacity(count_x * count_y);
                for jy in 0..*count_y {
                    for ix in 0..*count_x {
                        c.push((x0 + ix as f64 * dx, y0 + jy as f64 * dy));
                    }
                }
                c
            }
            SensorSpec::Points(p) => p.clone(),
        };
        Self::from_coords(grid, coords)
    }

    /// Snaps each coordinate to its nearest grid node.
    pub fn from_coords(grid: &Grid, coords: Vec<(f64, f64)>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("sensor layout is empty".into()));
        }
        let mut node_index = Vec::with_capacity(coords.len());
        for (s, &(x, y)) in coords.iter().enumerate() {
            let k = grid.nearest_node(x, y)?;
            if let Some(first) = node_index.iter().position(|&q| q == k) {
                return Err(Error::InvalidArgument(format!(
                    "sensors {first} and {s} snap to the same grid node {k}"
                )));
            }
            node_index.push(k);
        }
        Ok(Self { coords, node_index })
    }

    pub fn len(&self) -> usize {
        self.node_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_index.is_empty()
    }

    pub fn extract(&self, field: &[f64]) -> Vec<f64> {
        self.node_index.iter().map(|&k| field[k]).collect()
    }
}

/// Forcing term on the grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// `max(0.5, exp(−25(x−0.7)² − 25(y−0.7)²))`
    Bump,
    Zero,
    Nodal(Vec<f64>),
}

impl Source {
    pub fn nodal(&self, grid: &Grid) -> Result<Vec<f64>> {
        match self {
            Source::Bump => Ok(grid.sample_fn(|x, y| {
                let g = (-25.0 * (x - 0.7).powi(2) - 25.0 * (y - 0.7).powi(2)).exp();
                g.max(0.5)
            })),
            Source::Zero => Ok(vec![0.0; grid.n()]),
            Source::Nodal(v) => {
                if v.len() != grid.n() {
                    return Err(Error::Shape(format!(
                        "nodal source has length {}, grid has {} nodes",
                        v.len(),
                        grid.n()
                    )));
                }
                Ok(v.clone())
            }
        }
    }
}

/// Solver work counters. Counts are totals over the lifetime of a model.
#[derive(Debug, Default)]
pub struct SolveStats {
    forward: AtomicU64,
    linearized: AtomicU64,
    factorizations: AtomicU64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveCounts {
    /// Full forward PDE solves (one per evaluation).
    pub forward_solves: u64,
    /// Linear tangent/adjoint solves.
    pub linearized_solves: u64,
    /// Sparse factorizations, the dominant cost of both kinds of solve.
    pub factorizations: u64,
}

impl SolveCounts {
    pub fn saturating_sub(self, other: SolveCounts) -> SolveCounts {
        SolveCounts {
            forward_solves: self.forward_solves.saturating_sub(other.forward_solves),
            linearized_solves: self.linearized_solves.saturating_sub(other.linearized_solves),
            factorizations: self.factorizations.saturating_sub(other.factorizations),
        }
    }

    /// Banded-LU operation count on a grid with `n` unknowns and half
    /// bandwidth `b`: factorizations cost `2nb²`, triangular substitutions
    /// `2n(2b+1)`. Each factorization is paired with one substitution;
    /// linearized solves reuse a factorization and cost one substitution.
    pub fn work(&self, n: usize, b: usize) -> f64 {
        let (n, b) = (n as f64, b as f64);
        let factor = 2.0 * n * b * b;
        let subst = 2.0 * n * (2.0 * b + 1.0);
        self.factorizations as f64 * (factor + subst) + self.linearized_solves as f64 * subst
    }

    /// `self` expressed in forward solves, using the mean per-solve work of
    /// `reference` (a phase containing only forward solves).
    pub fn forward_equivalents(&self, reference: &SolveCounts, n: usize, b: usize) -> Result<f64> {
        if reference.forward_solves == 0 {
            return Err(Error::InvalidArgument("reference phase has no forward solves".into()));
        }
        let per_solve = reference.work(n, b) / reference.forward_solves as f64;
        if per_solve <= 0.0 {
            // models without a PDE solver: one evaluation is one solve
            return Ok((self.forward_solves + self.linearized_solves) as f64);
        }
        Ok(self.work(n, b) / per_solve)
    }
}

impl SolveStats {
    pub(crate) fn forward(&self) {
        self.forward.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn linearized(&self, count: u64) {
        self.linearized.fetch_add(count, Ordering::Relaxed);
    }

    pub(crate) fn factorization(&self) {
        self.factorizations.fetch_add(1, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> SolveCounts {
        SolveCounts {
            forward_solves: self.forward.load(Ordering::Relaxed),
            linearized_solves: self.linearized.load(Ordering::Relaxed),
            factorizations: self.factorizations.load(Ordering::Relaxed),
        }
    }
}

impl Clone for SolveStats {
    fn clone(&self) -> Self {
        let s = self.snapshot();
        Self {
            forward: AtomicU64::new(s.forward_solves),
            linearized: AtomicU64::new(s.linearized_solves),
            factorizations: AtomicU64::new(s.factorizations),
        }
    }
}

#[derive(Debug, Clone)]
pub enum ObservableMap {
    Linear(LinearModel),
    Elliptic(EllipticModel),
    Adr(AdrModel),
}

impl ObservableMap {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ObservableMap::Linear(_) => "linear",
            ObservableMap::Elliptic(_) => "elliptic",
            ObservableMap::Adr(_) => "adr",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ObservableMap::Linear(l) => l.n(),
            ObservableMap::Elliptic(e) => e.grid().n(),
            ObservableMap::Adr(a) => a.grid().n(),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            ObservableMap::Linear(l) => l.d(),
            ObservableMap::Elliptic(e) => e.layout().len(),
            ObservableMap::Adr(a) => a.layout().len(),
        }
    }

    fn check_input(&self, m: &[f64]) -> Result<()> {
        if m.len() != self.n() {
            return Err(Error::Shape(format!(
                "parameter has length {}, map expects {}",
                m.len(),
                self.n()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("parameter vector".into()));
        }
        Ok(())
    }

    pub fn evaluate(&self, m: &[f64]) -> Result<Vec<f64>> {
        self.check_input(m)?;
        match self {
            ObservableMap::Linear(l) => l.evaluate(m),
            ObservableMap::Elliptic(e) => e.evaluate(m),
            ObservableMap::Adr(a) => a.evaluate(m),
        }
    }

    /// Dense `d × n` Jacobian, assembled row by row from adjoint solves.
    pub fn jacobian(&self, m: &[f64]) -> Result<DMatrix<f64>> {
        self.check_input(m)?;
        match self {
            ObservableMap::Linear(l) => Ok(l.matrix().clone()),
            ObservableMap::Elliptic(e) => e.jacobian(m),
            ObservableMap::Adr(a) => a.jacobian(m),
        }
    }

    /// `J(m) p` by a tangent (forward-sensitivity) solve.
    pub fn apply_jacobian(&self, m: &[f64], p: &[f64]) -> Result<Vec<f64>> {
        self.check_input(m)?;
        if p.len() != self.n() {
            return Err(Error::Shape("direction length differs from n".into()));
        }
        match self {
            ObservableMap::Linear(l) => l.apply(p),
            ObservableMap::Elliptic(e) => e.apply_jacobian(m, p),
            ObservableMap::Adr(a) => a.apply_jacobian(m, p),
        }
    }

    /// `J(m)ᵀ q` by a single adjoint solve.
    pub fn apply_jacobian_transpose(&self, m: &[f64], q: &[f64]) -> Result<Vec<f64>> {
        self.check_input(m)?;
        if q.len() != self.d() {
            return Err(Error::Shape("adjoint direction length differs from d".into()));
        }
        match self {
            ObservableMap::Linear(l) => l.apply_transpose(q),
            ObservableMap::Elliptic(e) => e.apply_jacobian_transpose(m, q),
            ObservableMap::Adr(a) => a.apply_jacobian_transpose(m, q),
        }
    }

    pub fn solve_counts(&self) -> SolveCounts {
        match self {
            ObservableMap::Linear(_) => SolveCounts::default(),
            ObservableMap::Elliptic(e) => e.stats().snapshot(),
            ObservableMap::Adr(a) => a.stats().snapshot(),
        }
    }

    pub fn grid(&self) -> Option<&Grid> {
        match self {
            ObservableMap::Linear(_) => None,
            ObservableMap::Elliptic(e) => Some(e.grid()),
            ObservableMap::Adr(a) => Some(a.grid()),
        }
    }

    /// Unknown count and half bandwidth of the PDE systems, for [`SolveCounts::work`].
    pub fn system_shape(&self) -> (usize, usize) {
        match self.grid() {
            Some(g) => ((g.nx - 2) * (g.ny - 2), g.nx - 2),
            None => (0, 0),
        }
    }

    /// `counts` in forward solves, priced with this model's mean forward-solve
    /// work measured on `reference`.
    pub fn forward_equivalents(&self, counts: &SolveCounts, reference: &SolveCounts) -> Result<f64> {
        let (n, b) = self.system_shape();
        counts.forward_equivalents(reference, n, b)
    }

    pub fn layout(&self) -> Option<&SensorLayout> {
        match self {
            ObservableMap::Linear(_) => None,
            ObservableMap::Elliptic(e) => Some(e.layout()),
            ObservableMap::Adr(a) => Some(a.layout()),
        }
    }
}

impl Evaluator for ObservableMap {
    fn input_dim(&self) -> usize {
        self.n()
    }

    fn output_dim(&self) -> usize {
        self.d()
    }

    fn evaluate(&self, m: &[f64]) -> Result<Vec<f64>> {
        ObservableMap::evaluate(self, m)
    }

    fn evaluate_into(&self, m: &[f64], out: &mut Vec<f64>) -> Result<()> {
        match self {
            ObservableMap::Linear(l) => {
                self.check_input(m)?;
                l.evaluate_into(m, out);
                Ok(())
            }
            _ => {
                *out = ObservableMap::evaluate(self, m)?;
                Ok(())
            }
        }
    }

    fn solves_per_evaluation(&self) -> u64 {
        match self {
            ObservableMap::Linear(_) => 0,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        self.kind_name()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sensor_grid_spec_snaps_in_row_major_order() {
        let grid = Grid::unit_square(11).unwrap();
        let spec = SensorSpec::Grid {
            x0: 0.1,
            y0: 0.2,
            dx: 0.4,
            dy: 0.5,
            count_x: 2,
            count_y: 2,
        };
        let layout = SensorLayout::from_spec(&grid, &spec).unwrap();
        assert_eq!(
            layout.node_index,
            vec![grid.index(1, 2), grid.index(5, 2), grid.index(1, 7), grid.index(5, 7)]
        );
    }

    #[test]
    fn colliding_or_outside_sensors_rejected() {
        let grid = Grid::unit_square(5).unwrap();
        assert!(SensorLayout::from_coords(&grid, vec![(0.5, 0.5), (0.52, 0.49)]).is_err());
        assert!(SensorLayout::from_coords(&grid, vec![(1.5, 0.5)]).is_err());
        assert!(SensorLayout::from_coords(&grid, vec![]).is_err());
    }

    #[test]
    fn bump_source_floor() {
        let grid = Grid::unit_square(11).unwrap();
        let f = Source::Bump.nodal(&grid).unwrap();
        assert_eq!(f[grid.index(7, 7)], 1.0);
        assert_eq!(f[0], 0.5);
    }

    #[test]
    fn sensor_spec_deserializes_both_forms() {
        let g: SensorSpec =
            serde_json::from_str(r#"{"x0":0.1,"y0":0.1,"dx":0.2,"dy":0.2,"count_x":5,"count_y":5}"#).unwrap();
        assert!(matches!(g, SensorSpec::Grid { count_x: 5, .. }));
        let p: SensorSpec = serde_json::from_str("[[0.1,0.2],[0.3,0.4]]").unwrap();
        assert_eq!(p, SensorSpec::Points(vec![(0.1, 0.2), (0.3, 0.4)]));
    }

    #[test]
    fn work_model_counts() {
        let fwd = SolveCounts {
            forward_solves: 2,
            linearized_solves: 0,
            factorizations: 6,
        };
        // n = 4, b = 1: factor 8, substitution 24
        assert_eq!(fwd.work(4, 1), 6.0 * 32.0);
        let lin = SolveCounts {
            forward_solves: 0,
            linearized_solves: 4,
            factorizations: 0,
        };
        assert_eq!(lin.work(4, 1), 96.0);
        assert_eq!(fwd.forward_equivalents(&fwd, 4, 1).unwrap(), 2.0);
        assert_eq!(lin.forward_equivalents(&fwd, 4, 1).unwrap(), 1.0);
        assert!(lin.forward_equivalents(&lin, 4, 1).is_err());
        let none = SolveCounts {
            forward_solves: 3,
            ..Default::default()
        };
        assert_eq!(none.forward_equivalents(&none, 0, 0).unwrap(), 3.0);
    }
}
