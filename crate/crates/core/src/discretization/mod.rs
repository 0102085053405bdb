//! The non-eliminated discrete system: five-point Laplacian rows on interior
//! nodes and interpolated boundary-condition rows on ghost nodes.

mod grid_function;
mod interp;
mod operator;
mod system;

pub use grid_function::GridFunction;
pub use interp::{biquadratic_eval, biquadratic_grad, stencil_weights, InterpWeights};
pub use operator::{
    apply_laplacian, bc_apply, compute_defect, Discretization, GhostRow, ProblemData,
};
pub use system::{assemble_system, DirectSolver, SparseSystem};
