//! Exact objective evaluation: makespan, squared ℓ₂ norm of the load vector,
//! and total weighted completion time (by simulation and in closed form).

use crate::model::{Assignment, LoadVector, MachineModel, ScheduleInstance};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("assignment has shape {found_machines}x{found_jobs}, instance needs {machines}x{jobs}")]
    Dimension {
        machines: usize,
        jobs: usize,
        found_machines: usize,
        found_jobs: usize,
    },
    #[error("job type {job}: {assigned} jobs assigned, multiplicity is {required}")]
    Incomplete {
        job: usize,
        assigned: u64,
        required: BigInt,
    },
    #[error("job type {job} has infinite size on machine {machine} but {count} jobs are assigned there")]
    InfiniteSize { machine: usize, job: usize, count: u64 },
    #[error("job type {job} has no weight")]
    MissingWeight { job: usize },
}

fn check_shape(inst: &ScheduleInstance, a: &Assignment) -> Result<(), EvalError> {
    let k = inst.job_types();
    if a.counts.len() != inst.machines || a.counts.iter().any(|r| r.len() != k) {
        return Err(EvalError::Dimension {
            machines: inst.machines,
            jobs: k,
            found_machines: a.counts.len(),
            found_jobs: a.counts.first().map_or(0, Vec::len),
        });
    }
    Ok(())
}

/// Shape check plus `Σ_i x^i_j = n_j` for every job type.
pub fn check_complete(inst: &ScheduleInstance, a: &Assignment) -> Result<(), EvalError> {
    check_shape(inst, a)?;
    for (j, s) in a.column_sums(inst.job_types()).into_iter().enumerate() {
        if BigInt::from(s) != inst.jobs[j].multiplicity {
            return Err(EvalError::Incomplete {
                job: j,
                assigned: s,
                required: inst.jobs[j].multiplicity.clone(),
            });
        }
    }
    Ok(())
}

/// Like [`check_complete`] but only requires `Σ_i x^i_j <= n_j`.
pub fn check_partial(inst: &ScheduleInstance, a: &Assignment) -> Result<(), EvalError> {
    check_shape(inst, a)?;
    for (j, s) in a.column_sums(inst.job_types()).into_iter().enumerate() {
        if BigInt::from(s) > inst.jobs[j].multiplicity {
            return Err(EvalError::Incomplete {
                job: j,
                assigned: s,
                required: inst.jobs[j].multiplicity.clone(),
            });
        }
    }
    Ok(())
}

/// Unscaled load `Σ_j p^i_j x_j` of one machine configuration.
pub fn machine_load(inst: &ScheduleInstance, i: usize, x: &[u64]) -> Result<BigInt, EvalError> {
    let mut load = BigInt::zero();
    for (j, &c) in x.iter().enumerate() {
        if c == 0 {
            continue;
        }
        match inst.size(i, j) {
            Some(p) => load += p * BigInt::from(c),
            None => {
                return Err(EvalError::InfiniteSize {
                    machine: i,
                    job: j,
                    count: c,
                })
            }
        }
    }
    Ok(load)
}

fn scale(inst: &ScheduleInstance, i: usize, unscaled: &BigInt) -> BigRational {
    let l = BigRational::from_integer(unscaled.clone());
    match inst.model {
        MachineModel::Uniform => l / &inst.speeds[i],
        _ => l,
    }
}

/// Scaled load of one machine configuration.
pub fn machine_time(inst: &ScheduleInstance, i: usize, x: &[u64]) -> Result<BigRational, EvalError> {
    Ok(scale(inst, i, &machine_load(inst, i, x)?))
}

/// Loads of a (possibly partial) assignment.
pub fn loads(inst: &ScheduleInstance, a: &Assignment) -> Result<LoadVector, EvalError> {
    check_partial(inst, a)?;
    let mut unscaled = Vec::with_capacity(inst.machines);
    let mut scaled = Vec::with_capacity(inst.machines);
    for (i, row) in a.counts.iter().enumerate() {
        let l = machine_load(inst, i, row)?;
        scaled.push(scale(inst, i, &l));
        unscaled.push(l);
    }
    Ok(LoadVector { unscaled, scaled })
}

pub fn eval_makespan(inst: &ScheduleInstance, a: &Assignment) -> Result<BigRational, EvalError> {
    check_complete(inst, a)?;
    Ok(loads(inst, a)?
        .scaled
        .into_iter()
        .max()
        .unwrap_or_else(BigRational::zero))
}

pub fn eval_l2sq(inst: &ScheduleInstance, a: &Assignment) -> Result<BigRational, EvalError> {
    check_complete(inst, a)?;
    Ok(loads(inst, a)?.scaled.iter().map(|l| l * l).sum())
}

/// Job types present on machine `i`, in Smith order: ratio `w/p` nonincreasing,
/// ties by ascending index (or descending when `reverse_ties`).
fn smith_order(
    inst: &ScheduleInstance,
    i: usize,
    x: &[u64],
    reverse_ties: bool,
) -> Result<Vec<(usize, BigRational, BigRational, BigRational)>, EvalError> {
    let mut types = Vec::new();
    for (j, &c) in x.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let p = inst.scaled_size(i, j).ok_or(EvalError::InfiniteSize {
            machine: i,
            job: j,
            count: c,
        })?;
        let w = BigRational::from_integer(inst.jobs[j].weight.clone().ok_or(EvalError::MissingWeight { job: j })?);
        let rho = &w / &p;
        types.push((j, p, w, rho));
    }
    types.sort_by(|a, b| match b.3.cmp(&a.3) {
        Ordering::Equal if reverse_ties => b.0.cmp(&a.0),
        Ordering::Equal => a.0.cmp(&b.0),
        o => o,
    });
    Ok(types)
}

fn require_weights(inst: &ScheduleInstance) -> Result<(), EvalError> {
    match inst.jobs.iter().position(|j| j.weight.is_none()) {
        Some(j) => Err(EvalError::MissingWeight { job: j }),
        None => Ok(()),
    }
}

pub(crate) fn simulate_sumwc(
    inst: &ScheduleInstance,
    a: &Assignment,
    reverse_ties: bool,
) -> Result<BigRational, EvalError> {
    require_weights(inst)?;
    check_complete(inst, a)?;
    let mut total = BigRational::zero();
    for (i, row) in a.counts.iter().enumerate() {
        let mut clock = BigRational::zero();
        for (j, p, w, _) in smith_order(inst, i, row, reverse_ties)? {
            for _ in 0..row[j] {
                clock += &p;
                total += &w * &clock;
            }
        }
    }
    Ok(total)
}

/// Reference simulator: run each machine's jobs one by one in Smith order and
/// accumulate `w_j C_j`.
pub fn eval_sumwc_sim(inst: &ScheduleInstance, a: &Assignment) -> Result<BigRational, EvalError> {
    simulate_sumwc(inst, a, false)
}

/// Decomposition of the closed-form weighted completion time.
///
/// `load_term` is `½ Σ L_i²`. The quadratic part of the closed form minus the
/// load term is `gamma_quadr`; it is nonnegative whenever all Smith ratios are
/// at least one. Linear terms `½ p w x` are split between job types whose
/// scaled size is the same on every machine (`uniform_linear`) and the rest
/// (`gamma_linear`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumWcBreakdown {
    pub load_term: BigRational,
    pub uniform_linear: BigRational,
    pub gamma_linear: BigRational,
    pub gamma_quadr: BigRational,
    pub total: BigRational,
}

impl SumWcBreakdown {
    pub fn parts_sum(&self) -> BigRational {
        &self.load_term + &self.uniform_linear + &self.gamma_linear + &self.gamma_quadr
    }
}

/// Closed-form contribution of one machine configuration:
/// `½ Σ_t [ z_t² (ρ_t − ρ_{t+1}) + p_t w_t x_t ]` with `ρ_{τ+1} = 0`.
/// Returns `(quadratic, linear_per_type)`.
pub fn machine_sumwc_terms(
    inst: &ScheduleInstance,
    i: usize,
    x: &[u64],
) -> Result<(BigRational, Vec<(usize, BigRational)>), EvalError> {
    let order = smith_order(inst, i, x, false)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut z = BigRational::zero();
    let mut quadratic = BigRational::zero();
    let mut linear = Vec::with_capacity(order.len());
    for (t, (j, p, w, rho)) in order.iter().enumerate() {
        let cnt = BigRational::from_integer(BigInt::from(x[*j]));
        z += p * &cnt;
        let next_rho = order.get(t + 1).map_or_else(BigRational::zero, |o| o.3.clone());
        quadratic += &z * &z * (rho - next_rho);
        linear.push((*j, &half * p * w * cnt));
    }
    Ok((quadratic * half, linear))
}

/// Closed-form value of one machine configuration.
pub fn machine_sumwc(inst: &ScheduleInstance, i: usize, x: &[u64]) -> Result<BigRational, EvalError> {
    let (q, lin) = machine_sumwc_terms(inst, i, x)?;
    Ok(lin.into_iter().fold(q, |acc, (_, v)| acc + v))
}

pub fn eval_sumwc_closed(inst: &ScheduleInstance, a: &Assignment) -> Result<SumWcBreakdown, EvalError> {
    require_weights(inst)?;
    check_complete(inst, a)?;
    let independent: Vec<bool> = (0..inst.job_types()).map(|j| inst.machine_independent(j)).collect();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut load_term = BigRational::zero();
    let mut quadratic = BigRational::zero();
    let mut uniform_linear = BigRational::zero();
    let mut gamma_linear = BigRational::zero();
    for (i, row) in a.counts.iter().enumerate() {
        let l = machine_time(inst, i, row)?;
        load_term += &half * &l * &l;
        let (q, lin) = machine_sumwc_terms(inst, i, row)?;
        quadratic += q;
        for (j, v) in lin {
            if independent[j] {
                uniform_linear += v;
            } else {
                gamma_linear += v;
            }
        }
    }
    let gamma_quadr = quadratic - &load_term;
    let total = &load_term + &uniform_linear + &gamma_linear + &gamma_quadr;
    debug_assert!(!load_term.is_negative());
    Ok(SumWcBreakdown {
        load_term,
        uniform_linear,
        gamma_linear,
        gamma_quadr,
        total,
    })
}

/// Objective value of a complete assignment under `inst.objective`.
pub fn eval_objective(inst: &ScheduleInstance, a: &Assignment) -> Result<BigRational, EvalError> {
    use crate::model::Objective;
    match inst.objective {
        Objective::Cmax => eval_makespan(inst, a),
        Objective::L2Sq => eval_l2sq(inst, a),
        Objective::SumWc => eval_sumwc_sim(inst, a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::model::{JobType, Size};

    fn tiny() -> ScheduleInstance {
        ScheduleInstance::identical(2, vec![JobType::new(3, 2), JobType::new(5, 1)])
    }

    fn two_jobs(machines: usize) -> ScheduleInstance {
        ScheduleInstance::identical(
            machines,
            vec![JobType::new(1, 1).with_weight(2), JobType::new(2, 1).with_weight(1)],
        )
    }

    #[test]
    fn makespan_tiny() {
        let a = Assignment::new(vec![vec![2, 0], vec![0, 1]]);
        assert_eq!(eval_makespan(&tiny(), &a).unwrap(), ratio(6, 1));
        assert_eq!(eval_l2sq(&tiny(), &a).unwrap(), ratio(61, 1));
    }

    #[test]
    fn zero_instance_is_zero() {
        let inst = ScheduleInstance::identical(2, vec![JobType::new(3, 0)]);
        let a = Assignment::zeros(2, 1);
        assert_eq!(eval_makespan(&inst, &a).unwrap(), ratio(0, 1));
        assert_eq!(eval_l2sq(&inst, &a).unwrap(), ratio(0, 1));
    }

    #[test]
    fn uniform_speed_scales() {
        let inst = ScheduleInstance::uniform(vec![ratio(3, 2)], vec![JobType::new(3, 1)]);
        assert_eq!(
            eval_makespan(&inst, &Assignment::new(vec![vec![1]])).unwrap(),
            ratio(2, 1)
        );

        let inst = ScheduleInstance::uniform(vec![ratio(1, 1), ratio(2, 1)], vec![JobType::new(4, 2)]);
        let a = Assignment::new(vec![vec![1], vec![1]]);
        assert_eq!(eval_l2sq(&inst, &a).unwrap(), ratio(20, 1));
        let lv = loads(&inst, &a).unwrap();
        for i in 0..2 {
            assert_eq!(
                &lv.scaled[i] * inst.speed(i),
                BigRational::from_integer(lv.unscaled[i].clone())
            );
        }
    }

    #[test]
    fn incomplete_and_infinite_rejected() {
        let a = Assignment::new(vec![vec![1, 0], vec![0, 1]]);
        assert!(matches!(
            eval_makespan(&tiny(), &a),
            Err(EvalError::Incomplete { job: 0, .. })
        ));
        let bad = Assignment::new(vec![vec![1, 0]]);
        assert!(matches!(eval_makespan(&tiny(), &bad), Err(EvalError::Dimension { .. })));

        let inst = ScheduleInstance::unrelated(2, vec![JobType::per_machine(vec![Size::Infinite, 2.into()], 1)]);
        let a = Assignment::new(vec![vec![1], vec![0]]);
        assert!(matches!(
            eval_makespan(&inst, &a),
            Err(EvalError::InfiniteSize { machine: 0, job: 0, .. })
        ));
        let ok = Assignment::new(vec![vec![0], vec![1]]);
        assert_eq!(eval_makespan(&inst, &ok).unwrap(), ratio(2, 1));
    }

    #[test]
    fn smith_single_machine() {
        let a = Assignment::new(vec![vec![1, 1]]);
        assert_eq!(eval_sumwc_sim(&two_jobs(1), &a).unwrap(), ratio(5, 1));
        assert_eq!(eval_sumwc_closed(&two_jobs(1), &a).unwrap().total, ratio(5, 1));
    }

    // Enumerate both job orders directly: (1,2) gives 2*1 + 1*3 = 5, (2,1) gives 1*2 + 2*3 = 8.
    #[test]
    fn smith_order_is_the_better_permutation() {
        let orders = [[(1, 2), (2, 1)], [(2, 1), (1, 2)]];
        let values: Vec<i64> = orders
            .iter()
            .map(|o| {
                let mut t = 0;
                o.iter()
                    .map(|&(p, w)| {
                        t += p;
                        w * t
                    })
                    .sum()
            })
            .collect();
        assert_eq!(values, vec![5, 8]);
        let a = Assignment::new(vec![vec![1, 1]]);
        assert_eq!(
            eval_sumwc_sim(&two_jobs(1), &a).unwrap(),
            ratio(values[0].min(values[1]), 1)
        );
    }

    #[test]
    fn sumwc_single_job_and_split() {
        let inst = ScheduleInstance::identical(1, vec![JobType::new(2, 1).with_weight(2)]);
        let a = Assignment::new(vec![vec![1]]);
        assert_eq!(eval_sumwc_sim(&inst, &a).unwrap(), ratio(4, 1));
        assert_eq!(eval_sumwc_closed(&inst, &a).unwrap().total, ratio(4, 1));

        let split = Assignment::new(vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(eval_sumwc_sim(&two_jobs(2), &split).unwrap(), ratio(4, 1));
    }

    #[test]
    fn zero_weights_give_zero() {
        let inst = ScheduleInstance::identical(
            2,
            vec![JobType::new(3, 2).with_weight(0), JobType::new(5, 1).with_weight(0)],
        );
        let a = Assignment::new(vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(eval_sumwc_closed(&inst, &a).unwrap().total, ratio(0, 1));
        assert_eq!(eval_sumwc_sim(&inst, &a).unwrap(), ratio(0, 1));
    }

    #[test]
    fn missing_weight_is_an_error() {
        let a = Assignment::new(vec![vec![2, 0], vec![0, 1]]);
        assert_eq!(eval_sumwc_sim(&tiny(), &a), Err(EvalError::MissingWeight { job: 0 }));
        assert_eq!(eval_sumwc_closed(&tiny(), &a), Err(EvalError::MissingWeight { job: 0 }));
    }

    #[test]
    fn tie_order_does_not_change_value() {
        // Ratios tie at 1 for both types.
        let inst = ScheduleInstance::identical(
            1,
            vec![JobType::new(2, 2).with_weight(2), JobType::new(3, 1).with_weight(3)],
        );
        let a = Assignment::new(vec![vec![2, 1]]);
        let asc = simulate_sumwc(&inst, &a, false).unwrap();
        let desc = simulate_sumwc(&inst, &a, true).unwrap();
        assert_eq!(asc, desc);
        assert_eq!(asc, eval_sumwc_closed(&inst, &a).unwrap().total);
    }

    #[test]
    fn breakdown_parts_sum_to_total() {
        let inst = ScheduleInstance::unrelated(
            2,
            vec![
                JobType::per_machine(vec![2.into(), 3.into()], 2).with_weight(5),
                JobType::per_machine(vec![4.into(), 4.into()], 1).with_weight(4),
            ],
        );
        let a = Assignment::new(vec![vec![1, 1], vec![1, 0]]);
        let b = eval_sumwc_closed(&inst, &a).unwrap();
        assert_eq!(b.parts_sum(), b.total);
        assert_eq!(b.total, eval_sumwc_sim(&inst, &a).unwrap());
        // Type 1 is machine independent: ½ * 4 * 4 * 1.
        assert_eq!(b.uniform_linear, ratio(8, 1));
    }
}
