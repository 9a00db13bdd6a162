//! Reductions from (balanced) bin packing to high-multiplicity scheduling.
//!
//! Machine `i` of every reduced instance stands for item `a_i` of the source
//! instance. A schedule is *perfect* when each machine runs the jobs of exactly
//! one bin `j`: `a_i` copies of `α¹_j`, `A − a_i` copies of `α⁰_j` and one
//! `β_j` (plus one `γ` in the unrelated families). Perfect schedules reaching
//! the target are exactly the balanced packings.

use super::certificate::{Family, JobRole, RankTwo, ReductionCertificate, SumWcTerms};
use super::instances::{BalancedBinPackingInstance, BinPackingInstance};
use super::ReductionError;
use crate::arith::{ceil_sqrt, from_int};
use crate::model::{JobType, Objective, ScheduleInstance, Size};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Bin packing padding: every item grows by one, each bin by `n`,
/// and `n(k−1)` unit items fill the remaining slots so every bin holds `n`.
pub fn bp_to_bbp(bp: &BinPackingInstance) -> BalancedBinPackingInstance {
    let n = bp.items.len();
    let mut items: Vec<u64> = bp.items.iter().map(|a| a + 1).collect();
    items.extend(std::iter::repeat_n(1, n * (bp.bins - 1)));
    BalancedBinPackingInstance::new(items, bp.bins, bp.capacity + n as u64)
        .expect("padding yields n·k items for k bins")
}

struct Params {
    k: usize,
    m: usize,
    b: BigInt,
    /// `A = k·B`.
    big_a: BigInt,
    a: Vec<BigInt>,
}

fn params(bbp: &BalancedBinPackingInstance) -> Result<Params, ReductionError> {
    if bbp.items.is_empty() {
        return Err(ReductionError::Empty);
    }
    if !bbp.is_tight() {
        return Err(ReductionError::NotTight {
            total: bbp.total_size(),
            capacity: bbp.total_capacity(),
        });
    }
    if !bbp.items.len().is_multiple_of(bbp.bins) {
        return Err(ReductionError::NotDivisible {
            machines: bbp.items.len(),
            bins: bbp.bins,
        });
    }
    Ok(Params {
        k: bbp.bins,
        m: bbp.items.len(),
        b: BigInt::from(bbp.capacity),
        big_a: BigInt::from(bbp.total_capacity()),
        a: bbp.items.iter().map(|&x| BigInt::from(x)).collect(),
    })
}

fn base_certificate(bbp: &BalancedBinPackingInstance, family: Family, p: &Params) -> ReductionCertificate {
    ReductionCertificate {
        family,
        roles: Vec::new(),
        items: bbp.items.clone(),
        bins: bbp.bins,
        capacity: bbp.capacity,
        total: p.big_a.clone(),
        horizon: BigInt::zero(),
        a_max: bbp.a_max(),
        rank2: None,
        target: BigRational::zero(),
        radix: None,
        sumwc: None,
        derived: Vec::new(),
    }
}

/// The α/β job types as `(role, size, multiplicity)` in the fixed order
/// `α¹₁, α⁰₁, …, α¹_k, α⁰_k, β₁, …, β_k`.
fn alpha_beta(p: &Params) -> Vec<(JobRole, BigInt, BigInt)> {
    let k = BigInt::from(p.k);
    let a = &p.big_a;
    let a2 = a * a;
    let a3 = &a2 * a;
    let per_bin = BigInt::from(p.m / p.k);
    let mut out = Vec::with_capacity(3 * p.k);
    for j in 1..=p.k {
        let gap = &k - BigInt::from(j);
        let alpha0 = &k * &a2 + a * &gap;
        out.push((JobRole::AlphaOne(j - 1), &alpha0 + 1, p.b.clone()));
        out.push((JobRole::AlphaZero(j - 1), alpha0, &per_bin * a - &p.b));
    }
    for j in 1..=p.k {
        let gap = &k - BigInt::from(j);
        let beta = BigInt::from(2) * &k * &a3 - &a2 * &gap;
        out.push((JobRole::Beta(j - 1), beta, per_bin.clone()));
    }
    out
}

/// `T = 3kA³`.
fn horizon_q(p: &Params) -> BigInt {
    BigInt::from(3 * p.k) * &p.big_a * &p.big_a * &p.big_a
}

fn q_jobs(p: &Params) -> (Vec<JobRole>, Vec<JobType>) {
    alpha_beta(p)
        .into_iter()
        .map(|(r, size, n)| (r, JobType::new(size, n)))
        .unzip()
}

pub fn bbp_to_q_cmax(
    bbp: &BalancedBinPackingInstance,
) -> Result<(ScheduleInstance, ReductionCertificate), ReductionError> {
    let p = params(bbp)?;
    let t = horizon_q(&p);
    let (roles, jobs) = q_jobs(&p);
    let speeds = p.a.iter().map(|ai| BigRational::new(&t + ai, t.clone())).collect();
    let target = from_int(&t);
    let inst = ScheduleInstance::uniform(speeds, jobs).with_target(target.clone());
    let mut cert = base_certificate(bbp, Family::Bbp2QCmax, &p);
    cert.roles = roles;
    cert.horizon = t;
    cert.target = target;
    Ok((inst, cert))
}

/// Uniform-machine instance for the ℓ₂² objective: integer speeds
/// `s_i = ⌈(T + a_max)·√(T + a_i)⌉` keep every perfect machine's scaled load
/// distinct while preserving the order of speeds.
pub fn bbp_to_q_l2(
    bbp: &BalancedBinPackingInstance,
) -> Result<(ScheduleInstance, ReductionCertificate), ReductionError> {
    let p = params(bbp)?;
    let t = horizon_q(&p);
    let (roles, jobs) = q_jobs(&p);
    let top = &t + BigInt::from(bbp.a_max());
    let speeds: Vec<BigRational> = p.a.iter().map(|ai| from_int(&l2_speed(&top, &(&t + ai)))).collect();
    let target: BigRational =
        p.a.iter()
            .zip(&speeds)
            .map(|(ai, s)| {
                let l = from_int(&(&t + ai)) / s;
                &l * &l
            })
            .sum();
    let inst = ScheduleInstance::uniform(speeds, jobs)
        .with_objective(Objective::L2Sq)
        .with_target(target.clone());
    let mut cert = base_certificate(bbp, Family::Bbp2QL2, &p);
    cert.roles = roles;
    cert.horizon = t;
    cert.target = target;
    Ok((inst, cert))
}

/// Least integer `s` with `s² ≥ top²·load`.
pub fn l2_speed(top: &BigInt, load: &BigInt) -> BigInt {
    ceil_sqrt(&(top * top * load))
}

/// Strict upper bound on the ℓ₂ speeds: `s_i² < (T + a_max)²·(T + a_i + 1)`.
pub fn l2_speed_bound_holds(inst: &ScheduleInstance, cert: &ReductionCertificate) -> bool {
    let top = &cert.horizon + BigInt::from(cert.a_max);
    cert.items.iter().enumerate().all(|(i, &ai)| {
        let s = inst.speed(i);
        let bound = from_int(&(&top * &top * (&cert.horizon + BigInt::from(ai) + 1)));
        &s * &s < bound
    })
}

fn r_parts(p: &Params) -> (Vec<JobRole>, Vec<JobType>, RankTwo, BigInt) {
    let a3 = &p.big_a * &p.big_a * &p.big_a;
    let gamma_base = BigInt::from(4 * p.k) * &a3;
    let mut roles = Vec::new();
    let mut jobs = Vec::new();
    let mut c = Vec::new();
    for (r, size, n) in alpha_beta(p) {
        roles.push(r);
        c.push([size.clone(), BigInt::zero()]);
        jobs.push(JobType::per_machine(vec![Size::Finite(size); p.m], n));
    }
    roles.push(JobRole::Gamma);
    c.push([gamma_base.clone(), -BigInt::one()]);
    let gamma_sizes = p.a.iter().map(|ai| Size::Finite(&gamma_base - ai)).collect();
    jobs.push(JobType::per_machine(gamma_sizes, p.m));
    let d = p.a.iter().map(|ai| [BigInt::one(), ai.clone()]).collect();
    (roles, jobs, RankTwo { c, d }, gamma_base)
}

/// `T_R = 7kA³`.
fn horizon_r(p: &Params) -> BigInt {
    BigInt::from(7 * p.k) * &p.big_a * &p.big_a * &p.big_a
}

pub fn bbp_to_r_cmax(
    bbp: &BalancedBinPackingInstance,
) -> Result<(ScheduleInstance, ReductionCertificate), ReductionError> {
    let p = params(bbp)?;
    let t = horizon_r(&p);
    let (roles, jobs, rank2, _) = r_parts(&p);
    let target = from_int(&t);
    let inst = ScheduleInstance::unrelated(p.m, jobs).with_target(target.clone());
    let mut cert = base_certificate(bbp, Family::Bbp2RCmax, &p);
    cert.roles = roles;
    cert.horizon = t;
    cert.rank2 = Some(rank2);
    cert.target = target;
    Ok((inst, cert))
}

pub fn bbp_to_r_l2(
    bbp: &BalancedBinPackingInstance,
) -> Result<(ScheduleInstance, ReductionCertificate), ReductionError> {
    let p = params(bbp)?;
    let t = horizon_r(&p);
    let (roles, jobs, rank2, _) = r_parts(&p);
    let target = from_int(&(BigInt::from(p.m) * &t * &t));
    let inst = ScheduleInstance::unrelated(p.m, jobs)
        .with_objective(Objective::L2Sq)
        .with_target(target.clone());
    let mut cert = base_certificate(bbp, Family::Bbp2RL2, &p);
    cert.roles = roles;
    cert.horizon = t;
    cert.rank2 = Some(rank2);
    cert.target = target;
    Ok((inst, cert))
}

/// Weighted completion time: `w_t = p_t` for the α/β types, so all of them
/// share Smith ratio 1, and `w_γ = 4kA³`, which puts γ first on every machine.
pub fn bbp_to_r_sumwc(
    bbp: &BalancedBinPackingInstance,
) -> Result<(ScheduleInstance, ReductionCertificate), ReductionError> {
    let p = params(bbp)?;
    let t = horizon_r(&p);
    let (roles, mut jobs, rank2, gamma_weight) = r_parts(&p);
    let last = jobs.len() - 1;
    for job in &mut jobs[..last] {
        let size = match &job.sizes {
            crate::model::JobSizes::PerMachine(v) => v[0].finite().cloned().expect("finite α/β size"),
            crate::model::JobSizes::Common(s) => s.clone(),
        };
        job.weight = Some(size);
    }
    jobs[last].weight = Some(gamma_weight.clone());

    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let load_term = from_int(&(BigInt::from(p.m) * &t * &t)) * &half;
    let gamma: BigInt = alpha_beta(&p).iter().map(|(_, size, n)| n * size * size).sum();
    let gamma_sizes: Vec<BigInt> = p.a.iter().map(|ai| &gamma_weight - ai).collect();
    let delta_linear: BigInt = gamma_sizes.iter().map(|g| g * &gamma_weight).sum();
    let delta_quadr: BigInt = gamma_sizes.iter().zip(&p.a).map(|(g, ai)| g * ai).sum();
    let terms = SumWcTerms {
        load_term,
        gamma: from_int(&gamma) * &half,
        delta_linear: from_int(&delta_linear) * &half,
        delta_quadr: from_int(&delta_quadr) * &half,
    };
    let target = terms.total();
    let inst = ScheduleInstance::unrelated(p.m, jobs)
        .with_objective(Objective::SumWc)
        .with_target(target.clone());
    let mut cert = base_certificate(bbp, Family::Bbp2RSumWc, &p);
    cert.roles = roles;
    cert.horizon = t;
    cert.rank2 = Some(rank2);
    cert.target = target;
    cert.sumwc = Some(terms);
    Ok((inst, cert))
}

/// Two-bin variant with four job types and `T = A⁴`. Machines of bin 1 run
/// `a_i × α¹₁ + (A − a_i) × α⁰₁`; machines of bin 2 run `β₂ + a_i × α¹₂`.
pub fn bbp_to_r_cmax_4types(
    bbp: &BalancedBinPackingInstance,
) -> Result<(ScheduleInstance, ReductionCertificate), ReductionError> {
    if bbp.bins != 2 {
        return Err(ReductionError::BinCount {
            expected: 2,
            found: bbp.bins,
        });
    }
    let p = params(bbp)?;
    let a = &p.big_a;
    let a2 = a * a;
    let a3 = &a2 * a;
    let a4 = &a3 * a;
    let half_a: BigInt = a / 2;
    let half_m = BigInt::from(p.m / 2);
    let rows: [(JobRole, [BigInt; 2], BigInt); 4] = [
        (JobRole::AlphaOne(0), [&a3 + a, -BigInt::one()], half_a.clone()),
        (
            JobRole::AlphaZero(0),
            [a3.clone(), -BigInt::one()],
            &half_m * a - &half_a,
        ),
        (JobRole::AlphaOne(1), [a2.clone(), BigInt::zero()], half_a),
        (JobRole::Beta(1), [a4.clone(), -a2.clone()], half_m),
    ];
    let d: Vec<[BigInt; 2]> = p.a.iter().map(|ai| [BigInt::one(), ai.clone()]).collect();
    let mut roles = Vec::new();
    let mut jobs = Vec::new();
    let mut c = Vec::new();
    for (role, row, n) in rows {
        let sizes = d
            .iter()
            .map(|col| Size::Finite(&row[0] * &col[0] + &row[1] * &col[1]))
            .collect();
        roles.push(role);
        jobs.push(JobType::per_machine(sizes, n));
        c.push(row);
    }
    let target = from_int(&a4);
    let inst = ScheduleInstance::unrelated(p.m, jobs).with_target(target.clone());
    let mut cert = base_certificate(bbp, Family::Bbp2RCmax4, &p);
    cert.roles = roles;
    cert.horizon = a4;
    cert.rank2 = Some(RankTwo { c, d });
    cert.target = target;
    cert.derived = vec!["multiplicities".to_string()];
    Ok((inst, cert))
}

/// Checks `C·D` against the instance's size matrix entry by entry.
pub fn rank2_matches(inst: &ScheduleInstance, cert: &ReductionCertificate) -> bool {
    let Some(r) = &cert.rank2 else {
        return false;
    };
    r.c.len() == inst.job_types()
        && r.d.len() == inst.machines
        && (0..inst.job_types()).all(|t| (0..inst.machines).all(|i| inst.size(i, t) == Some(&r.entry(t, i))))
}
