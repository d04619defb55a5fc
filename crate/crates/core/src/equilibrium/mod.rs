//! Symmetric mixed-strategy equilibrium of the gas-fee game.

mod kernel;
mod path;
mod solution;

pub use kernel::{k_kernel, q_hat, v_fun};
pub(crate) use kernel::inverse_advantage;
pub use path::{check_opportunity, find_z_hat, solve_xhat, PathNode, SolverConfig, XhatPath};
pub use solution::{assemble, solve_equilibrium, CaseTag, EquilibriumSolution};
