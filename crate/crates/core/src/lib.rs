//! Bayesian optimal sensor placement for PDE-governed inverse problems.
//!
//! The crate estimates the expected information gain (EIG) of a sensor
//! design by double-loop Monte Carlo, replaces the expensive
//! parameter-to-observable map with a projected low-rank ResNet surrogate
//! built on active-subspace and POD bases, and selects sensors greedily.

pub mod container;
pub mod design;
pub mod dipnet;
pub mod eig;
pub mod error;
pub mod grid;
pub mod json;
pub mod linalg;
pub mod models;
pub mod prior;
pub mod reduction;
pub mod rng;
pub mod verify;

mod par;

pub use error::{Error, Result};
pub use grid::Grid;
pub use models::{Evaluator, ObservableMap};
pub use prior::{DenseGaussianPrior, GaussianFieldPrior, GaussianPrior};
