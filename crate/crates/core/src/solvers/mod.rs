//! Exact solvers: the configuration DP, a brute-force oracle, bin packing
//! feasibility search and a small cutting stock solver.

mod brute;
mod config;
mod cutting_stock;
mod dp;
mod packing;

pub use brute::{brute_force_solve, brute_force_solve_with};
pub use config::enumerate_configurations;
pub use cutting_stock::{
    cuttingstock_brute_force, cuttingstock_solve, cuttingstock_solve_with, CuttingStockSolution, PackedBin,
};
pub use dp::{dp_feasible_cmax, dp_feasible_cmax_with, dp_minimize, dp_minimize_with};
pub use packing::{balanced_packing_search, packing_search};

use crate::eval::EvalError;
use crate::model::ModelError;
use thiserror::Error;

pub const DEFAULT_MAX_STATES: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Upper limit on the number of states (or enumerated assignments).
    pub max_states: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("state budget exceeded: {states} states > limit {limit}")]
    BudgetExceeded { states: usize, limit: usize },
    #[error("no complete assignment exists")]
    NoFeasibleAssignment,
    #[error("item type {item} fits in no bin")]
    Infeasible { item: usize },
}
