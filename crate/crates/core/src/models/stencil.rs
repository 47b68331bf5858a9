//! Shared five-point machinery for the Dirichlet models: unknowns are the
//! interior nodes (row-major), boundary values are zero.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::BandMatrix;

/// A grid edge between nodes `p` and `q` with `1/h²` of its axis.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Face {
    pub p: usize,
    pub q: usize,
    pub inv_h2: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Interior {
    nodes: Vec<usize>,
    unknown: Vec<Option<usize>>,
    width: usize,
    faces: Vec<Face>,
}

impl Interior {
    pub fn new(grid: &Grid) -> Result<Self> {
        if grid.nx < 3 || grid.ny < 3 {
            return Err(Error::InvalidArgument(format!(
                "Dirichlet models need at least 3 nodes per axis, got {}x{}",
                grid.nx, grid.ny
            )));
        }
        let mut nodes = Vec::new();
        let mut unknown = vec![None; grid.n()];
        for (k, slot) in unknown.iter_mut().enumerate() {
            if !grid.is_boundary(k) {
                *slot = Some(nodes.len());
                nodes.push(k);
            }
        }
        let ihx = 1.0 / (grid.hx() * grid.hx());
        let ihy = 1.0 / (grid.hy() * grid.hy());
        let mut faces = Vec::new();
        for k in 0..grid.n() {
            let (i, j) = grid.ij(k);
            if i + 1 < grid.nx {
                let q = k + 1;
                if !grid.is_boundary(k) || !grid.is_boundary(q) {
                    faces.push(Face { p: k, q, inv_h2: ihx });
                }
            }
            if j + 1 < grid.ny {
                let q = k + grid.nx;
                if !grid.is_boundary(k) || !grid.is_boundary(q) {
                    faces.push(Face { p: k, q, inv_h2: ihy });
                }
            }
        }
        Ok(Self {
            nodes,
            unknown,
            width: grid.nx - 2,
            faces,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, u: usize) -> usize {
        self.nodes[u]
    }

    pub fn unknown(&self, k: usize) -> Option<usize> {
        self.unknown[k]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn empty_matrix(&self) -> BandMatrix {
        BandMatrix::zeros(self.len(), self.width, self.width)
    }

    pub fn restrict(&self, field: &[f64]) -> Vec<f64> {
        self.nodes.iter().map(|&k| field[k]).collect()
    }

    /// Interior values to a full nodal field with zero boundary.
    pub fn prolong(&self, values: &[f64], n_nodes: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_nodes];
        for (u, &k) in self.nodes.iter().enumerate() {
            out[k] = values[u];
        }
        out
    }

    /// Adds the symmetric diffusion block `Σ_faces c (u_p − u_q)` to `a`.
    pub fn add_diffusion(&self, a: &mut BandMatrix, coeff: impl Fn(&Face) -> f64) {
        for face in &self.faces {
            let c = coeff(face) * face.inv_h2;
            let up = self.unknown[face.p];
            let uq = self.unknown[face.q];
            if let Some(up) = up {
                a.add(up, up, c);
                if let Some(uq) = uq {
                    a.add(up, uq, -c);
                }
            }
            if let Some(uq) = uq {
                a.add(uq, uq, c);
                if let Some(up) = up {
                    a.add(uq, up, -c);
                }
            }
        }
    }
}
