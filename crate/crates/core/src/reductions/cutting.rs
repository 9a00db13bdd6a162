//! Uniform-machine makespan to cutting stock.
//!
//! Every bin and item size is a three-digit number in a mixed radix
//! `(K₁, K₂, 1)`. The leading digit counts machines (one `η` item per bin),
//! the middle digit identifies the machine by a power of two (`2^m − 1` `ν`
//! items fill exactly one bin of each type), and the last digit is the
//! machine's capacity `T·s_i` for the original jobs. The radices are chosen
//! so that no digit can carry into the next.

use super::certificate::{Family, JobRole, ReductionCertificate};
use super::instances::CuttingStockInstance;
use super::ReductionError;
use crate::arith::from_int;
use crate::model::{MachineModel, ScheduleInstance};
use num_bigint::BigInt;
use num_traits::{One, Zero};

pub fn q_to_cutting_stock(
    q: &ScheduleInstance,
    source: Option<&ReductionCertificate>,
) -> Result<(CuttingStockInstance, ReductionCertificate), ReductionError> {
    if q.model == MachineModel::Unrelated {
        return Err(ReductionError::NotUniform);
    }
    let t = q.target.clone().ok_or(ReductionError::MissingTarget)?;
    let m = q.machines;
    let mut caps = Vec::with_capacity(m);
    for i in 0..m {
        let c = &t * q.speed(i);
        if !c.is_integer() {
            return Err(ReductionError::NonIntegralCapacity { machine: i });
        }
        caps.push(c.to_integer());
    }
    let n = q.multiplicities().map_err(|_| ReductionError::BadInstance)?;

    let cap_total: BigInt = caps.iter().sum();
    let k2: BigInt = &cap_total + 1;
    let pow_m = BigInt::one() << m;
    let k1: BigInt = &k2 * &pow_m;

    let mut bin_sizes = Vec::with_capacity(m);
    for (i, cap) in caps.iter().enumerate() {
        bin_sizes.push(&k1 + (BigInt::one() << i) * &k2 + cap);
    }
    let mut item_sizes = Vec::new();
    let mut item_counts = Vec::new();
    let mut roles = Vec::new();
    for (j, &cnt) in n.iter().enumerate() {
        let p = q.size(0, j).ok_or(ReductionError::BadInstance)?.clone();
        item_sizes.push(p);
        item_counts.push(cnt);
        roles.push(JobRole::Original(j));
    }
    let nu_count: BigInt = &pow_m - 1;
    item_sizes.push(k1.clone());
    item_counts.push(m as u64);
    roles.push(JobRole::Eta);
    item_sizes.push(k2.clone());
    item_counts.push(u64::try_from(&nu_count).map_err(|_| ReductionError::BadInstance)?);
    roles.push(JobRole::Nu);

    let budget = BigInt::from(m) * &k1 + &nu_count * &k2 + &cap_total;
    // Carry-freeness: each lower digit's total mass stays below its radix.
    assert!(cap_total < k2);
    assert!(&nu_count * &k2 + &cap_total < k1);

    let cs = CuttingStockInstance::new(item_sizes, item_counts, bin_sizes.clone(), bin_sizes)
        .map_err(|_| ReductionError::BadInstance)?
        .with_budget(budget.clone());

    let cert = ReductionCertificate {
        family: Family::Q2Cs,
        roles,
        items: source.map(|c| c.items.clone()).unwrap_or_default(),
        bins: source.map_or(0, |c| c.bins),
        capacity: source.map_or(0, |c| c.capacity),
        total: source.map_or_else(BigInt::zero, |c| c.total.clone()),
        horizon: source.map_or_else(|| t.to_integer(), |c| c.horizon.clone()),
        a_max: source.map_or(0, |c| c.a_max),
        rank2: None,
        target: from_int(&budget),
        radix: Some((k1, k2)),
        sumwc: None,
        derived: vec!["radix".to_string()],
    };
    Ok((cs, cert))
}
