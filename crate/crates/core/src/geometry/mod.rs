//! Embedded-domain geometry: the Cartesian grid, level-set samples and their
//! reinitialization, node classification, and per-ghost boundary projections
//! with their upwind interpolation stencils.

mod classify;
mod ghost;
mod grid;
mod level_set;

pub use classify::{classify_nodes, NodeClass, NodeClassMask};
pub use ghost::{
    build_ghosts, closest_boundary_point, level_set_gradient, upwind_stencil, BcKind,
    BoundarySplit, GhostMeta, StencilExtent, StencilSpec,
};
pub use grid::{build_grid, GridSpec};
pub use level_set::{reinitialize, sample_level_set, LevelSetField, ReinitReport};
