//! Hardness reductions with constructive certificates.
//!
//! Each generator returns the reduced instance together with a
//! [`ReductionCertificate`] describing job roles and the derived constants.
//! [`perfect_schedule`] maps a packing of the source forward, and
//! [`packing_from_perfect_schedule`] maps a schedule back.

mod certificate;
mod cutting;
mod instances;
mod perfect;
mod schedule;

pub use certificate::{Family, JobRole, RankTwo, ReductionCertificate, SumWcTerms};
pub use cutting::q_to_cutting_stock;
pub use instances::{BalancedBinPackingInstance, BinPackingInstance, CuttingStockInstance, InstanceError};
pub use perfect::{packing_from_perfect_schedule, perfect_schedule, NotPerfect};
pub use schedule::{
    bbp_to_q_cmax, bbp_to_q_l2, bbp_to_r_cmax, bbp_to_r_cmax_4types, bbp_to_r_l2, bbp_to_r_sumwc, bp_to_bbp, l2_speed,
    l2_speed_bound_holds, rank2_matches,
};

use crate::model::ScheduleInstance;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("source instance is empty")]
    Empty,
    #[error("source instance is not tight: total size {total} ≠ k·B = {capacity}")]
    NotTight { total: u64, capacity: u64 },
    #[error("{machines} items are not divisible by {bins} bins")]
    NotDivisible { machines: usize, bins: usize },
    #[error("this reduction needs exactly {expected} bins, got {found}")]
    BinCount { expected: usize, found: usize },
    #[error("machine {machine}: T·s_i is not an integer")]
    NonIntegralCapacity { machine: usize },
    #[error("expected a uniform or identical machine instance")]
    NotUniform,
    #[error("instance has no target")]
    MissingTarget,
    #[error("instance cannot be encoded")]
    BadInstance,
    #[error("packing is not a valid balanced packing of the source instance")]
    BadPacking,
    #[error("operation not available for family {0}")]
    Unsupported(Family),
}

/// Dispatches a BBP-sourced scheduling reduction by family.
pub fn reduce_bbp(
    family: Family,
    bbp: &BalancedBinPackingInstance,
) -> Result<(ScheduleInstance, ReductionCertificate), ReductionError> {
    match family {
        Family::Bbp2QCmax => bbp_to_q_cmax(bbp),
        Family::Bbp2RCmax => bbp_to_r_cmax(bbp),
        Family::Bbp2RCmax4 => bbp_to_r_cmax_4types(bbp),
        Family::Bbp2QL2 => bbp_to_q_l2(bbp),
        Family::Bbp2RL2 => bbp_to_r_l2(bbp),
        Family::Bbp2RSumWc => bbp_to_r_sumwc(bbp),
        Family::Bp2Bbp | Family::Q2Cs => Err(ReductionError::Unsupported(family)),
    }
}
