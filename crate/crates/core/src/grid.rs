use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform node grid on `[0, lx] × [0, ly]`. Nodes are numbered row-major:
/// `k = j * nx + i` with `x = i * hx`, `y = j * hy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 nodes per axis, got {nx}x{ny}"
            )));
        }
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid side lengths must be positive, got {lx}x{ly}"
            )));
        }
        Ok(Self { nx, ny, lx, ly })
    }

    pub fn unit_square(nodes_per_axis: usize) -> Result<Self> {
        Self::new(nodes_per_axis, nodes_per_axis, 1.0, 1.0)
    }

    pub fn n(&self) -> usize {
        self.nx * self.ny
    }

    pub fn hx(&self) -> f64 {
        self.lx / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        self.ly / (self.ny - 1) as f64
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    pub fn coords(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.ij(k);
        (i as f64 * self.hx(), j as f64 * self.hy())
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        let (i, j) = self.ij(k);
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.lx).contains(&x) && (0.0..=self.ly).contains(&y)
    }

    /// Nearest node to `(x, y)`; halfway points round up.
    pub fn nearest_node(&self, x: f64, y: f64) -> Result<usize> {
        if !self.contains(x, y) {
            return Err(Error::InvalidArgument(format!(
                "point ({x}, {y}) outside the domain [0, {}] x [0, {}]",
                self.lx, self.ly
            )));
        }
        let i = ((x / self.hx()) + 0.5).floor() as usize;
        let j = ((y / self.hy()) + 0.5).floor() as usize;
        Ok(self.index(i.min(self.nx - 1), j.min(self.ny - 1)))
    }

    /// Nodal values of `f(x, y)` in node order.
    pub fn sample_fn(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.n())
            .map(|k| {
                let (x, y) = self.coords(k);
                f(x, y)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_ordering() {
        let g = Grid::new(4, 3, 3.0, 1.0).unwrap();
        assert_eq!(g.n(), 12);
        assert_eq!(g.hx(), 1.0);
        assert_eq!(g.hy(), 0.5);
        assert_eq!(g.index(1, 2), 9);
        assert_eq!(g.ij(9), (1, 2));
        assert_eq!(g.coords(9), (1.0, 1.0));
        assert!(g.is_boundary(0) && !g.is_boundary(5) && g.is_boundary(7));
    }

    #[test]
    fn nearest_node_snaps_and_rejects_outside() {
        let g = Grid::unit_square(11).unwrap();
        assert_eq!(g.nearest_node(0.31, 0.69).unwrap(), g.index(3, 7));
        assert_eq!(g.nearest_node(1.0, 1.0).unwrap(), g.n() - 1);
        assert!(g.nearest_node(1.01, 0.5).is_err());
    }

    #[test]
    fn degenerate_grids_rejected() {
        assert!(Grid::new(1, 4, 1.0, 1.0).is_err());
        assert!(Grid::new(3, 4, 0.0, 1.0).is_err());
    }
}
