//! Exact high-multiplicity scheduling: instance model, evaluators, a
//! configuration DP, hardness reductions, an N-fold ILP exporter and a
//! verification harness.

pub mod arith;
pub mod eval;
pub mod format;
pub mod model;
pub mod nfold;
pub mod reductions;
pub mod solvers;
pub mod verify;

pub use eval::{
    eval_l2sq, eval_makespan, eval_objective, eval_sumwc_closed, eval_sumwc_sim, EvalError, SumWcBreakdown,
};
pub use model::{
    validate_instance, Assignment, JobSizes, JobType, LoadVector, MachineModel, ModelError, Objective,
    ScheduleInstance, Size, ValidationReport, Violation,
};
