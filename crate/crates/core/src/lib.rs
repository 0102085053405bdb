//! Geometric multigrid for the Poisson equation on domains described by a
//! level-set function on a Cartesian grid, with Dirichlet and Neumann
//! conditions imposed at ghost points and relaxed together with the interior
//! equations.

pub mod bench;
pub mod cycles;
mod dense;
pub mod discretization;
pub mod error;
pub mod geometry;
pub mod smoothers;
pub mod solver1d;
pub mod transfer;

pub use error::{Error, Result};
