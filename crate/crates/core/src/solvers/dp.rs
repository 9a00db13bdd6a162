//! Layered dynamic program over job-count vectors.
//!
//! Layer `i` holds every vector `n'` of jobs that can be placed on the first
//! `i` machines. Only reachable states are stored. For the decision version two
//! necessary conditions discard states early: the remaining work must fit into
//! the remaining capacity (measured with the smallest size each job type has on
//! a later machine), and for every prefix of the job types ordered by that
//! smallest size, the remaining count must not exceed how many such jobs later
//! machines can hold at all.

use super::config::{enumerate_configurations, Enumeration, Proxy};
use super::{SolveError, SolverOptions};
use crate::arith::floor_rational;
use crate::eval::{eval_makespan, machine_sumwc, machine_time};
use crate::model::{Assignment, Objective, ScheduleInstance};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap};

const PARALLEL_LAYER: usize = 64;

type State = Vec<u64>;

/// Back pointer: predecessor state and the configuration used on this layer.
type Back = (State, Vec<u64>);

/// Per-layer data derived from the machines after the current one.
struct LaterMachines {
    /// Smallest finite size of each job type on a later machine.
    min_size: Vec<Option<BigInt>>,
    /// Total unscaled capacity of later machines (decision version only).
    capacity: BigInt,
    /// Job types sorted by `min_size` descending, with the number of such
    /// jobs later machines can hold for each prefix of that order.
    prefix_order: Vec<usize>,
    prefix_cap: Vec<BigInt>,
}

fn later_machines(inst: &ScheduleInstance, i: usize, caps: Option<&[BigInt]>) -> LaterMachines {
    let k = inst.job_types();
    let later = (i + 1)..inst.machines;
    let min_size: Vec<Option<BigInt>> = (0..k)
        .map(|j| later.clone().filter_map(|l| inst.size(l, j)).min().cloned())
        .collect();
    let mut prefix_order = Vec::new();
    let mut prefix_cap = Vec::new();
    let mut capacity = BigInt::zero();
    if let Some(caps) = caps {
        capacity = later.clone().map(|l| caps[l].clone()).sum();
        prefix_order = (0..k).filter(|&j| min_size[j].is_some()).collect();
        prefix_order.sort_by(|&a, &b| min_size[b].cmp(&min_size[a]).then(a.cmp(&b)));
        let mut running_min: Vec<Option<BigInt>> = vec![None; inst.machines];
        for &j in &prefix_order {
            let mut total = BigInt::zero();
            for l in later.clone() {
                if let Some(p) = inst.size(l, j) {
                    let slot = &mut running_min[l];
                    if slot.as_ref().is_none_or(|cur| p < cur) {
                        *slot = Some(p.clone());
                    }
                }
                if let Some(p) = &running_min[l] {
                    if p.is_positive() && !caps[l].is_negative() {
                        total += caps[l].div_floor(p);
                    }
                }
            }
            prefix_cap.push(total);
        }
    }
    LaterMachines {
        min_size,
        capacity,
        prefix_order,
        prefix_cap,
    }
}

impl LaterMachines {
    fn forced(&self) -> Vec<bool> {
        self.min_size.iter().map(Option::is_none).collect()
    }

    fn counts_fit(&self, rem: &[u64]) -> bool {
        let mut count = 0u64;
        for (r, &j) in self.prefix_order.iter().enumerate() {
            count += rem[j];
            if BigInt::from(count) > self.prefix_cap[r] {
                return false;
            }
        }
        true
    }

    fn mass_threshold(&self, rem: &[u64]) -> BigInt {
        let mass: BigInt = rem
            .iter()
            .zip(&self.min_size)
            .filter_map(|(&r, q)| q.as_ref().map(|q| q * BigInt::from(r)))
            .sum();
        mass - &self.capacity
    }
}

fn sub(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn reconstruct(layers: &[BTreeMap<State, Back>], full: &[u64]) -> Assignment {
    let m = layers.len();
    let mut counts = vec![Vec::new(); m];
    let mut key = full.to_vec();
    for i in (0..m).rev() {
        let (prev, x) = &layers[i][&key];
        counts[i] = x.clone();
        key = prev.clone();
    }
    Assignment::new(counts)
}

fn unscaled_caps(inst: &ScheduleInstance, t: &BigRational) -> Vec<BigInt> {
    (0..inst.machines)
        .map(|i| floor_rational(&(t * inst.speed(i))))
        .collect()
}

/// Decision version: an assignment with makespan at most `t`, or `None`.
pub fn dp_feasible_cmax(inst: &ScheduleInstance, t: &BigRational) -> Result<Option<Assignment>, SolveError> {
    dp_feasible_cmax_with(inst, t, &SolverOptions::default())
}

pub fn dp_feasible_cmax_with(
    inst: &ScheduleInstance,
    t: &BigRational,
    opts: &SolverOptions,
) -> Result<Option<Assignment>, SolveError> {
    let n = inst.multiplicities()?;
    let k = n.len();
    let m = inst.machines;
    if m == 0 {
        return Ok(n.iter().all(|&c| c == 0).then(|| Assignment::zeros(0, k)));
    }
    let caps = unscaled_caps(inst, t);
    let mut layers: Vec<BTreeMap<State, Back>> = Vec::with_capacity(m);
    let mut frontier: Vec<State> = vec![vec![0; k]];
    let mut total_states = 1usize;

    for i in 0..m {
        if caps[i].is_negative() {
            return Ok(None);
        }
        let later = later_machines(inst, i, Some(&caps));
        let forced = later.forced();
        let sizes: Vec<Option<&BigInt>> = (0..k).map(|j| inst.size(i, j)).collect();

        let expand = |used: &State| -> Vec<(State, Vec<u64>)> {
            let rem = sub(&n, used);
            let e = Enumeration {
                sizes: &sizes,
                cap: Some(&caps[i]),
                bound: &rem,
                forced: &forced,
                proxy: Some(Proxy {
                    weights: &later.min_size,
                    threshold: later.mass_threshold(&rem),
                }),
            };
            let mut out = Vec::new();
            e.for_each(|x, _| {
                if later.counts_fit(&sub(&rem, x)) {
                    out.push((add(used, x), x.to_vec()));
                }
            });
            out
        };

        let candidates: Vec<Vec<(State, Vec<u64>)>> = if frontier.len() >= PARALLEL_LAYER {
            frontier.par_iter().map(expand).collect()
        } else {
            frontier.iter().map(expand).collect()
        };

        let mut layer: BTreeMap<State, Back> = BTreeMap::new();
        for (used, cands) in frontier.iter().zip(candidates) {
            for (next, x) in cands {
                layer.entry(next).or_insert_with(|| (used.clone(), x));
            }
        }
        total_states += layer.len();
        if total_states > opts.max_states {
            return Err(SolveError::BudgetExceeded {
                states: total_states,
                limit: opts.max_states,
            });
        }
        frontier = layer.keys().cloned().collect();
        layers.push(layer);
        if frontier.is_empty() {
            return Ok(None);
        }
    }

    if !layers[m - 1].contains_key(&n) {
        return Ok(None);
    }
    let a = reconstruct(&layers, &n);
    let makespan = eval_makespan(inst, &a)?;
    assert!(&makespan <= t, "dp returned makespan {makespan} above {t}");
    Ok(Some(a))
}

/// Optimal assignment and exact optimal value under `inst.objective`.
pub fn dp_minimize(inst: &ScheduleInstance) -> Result<(Assignment, BigRational), SolveError> {
    dp_minimize_with(inst, &SolverOptions::default())
}

pub fn dp_minimize_with(
    inst: &ScheduleInstance,
    opts: &SolverOptions,
) -> Result<(Assignment, BigRational), SolveError> {
    match inst.objective {
        Objective::Cmax => minimize_cmax(inst, opts),
        Objective::L2Sq | Objective::SumWc => minimize_separable(inst, opts),
    }
}

/// Greedy list schedule; only used to bound the makespan candidates.
fn greedy_makespan(inst: &ScheduleInstance, n: &[u64]) -> Result<BigRational, SolveError> {
    let m = inst.machines;
    let mut load = vec![BigRational::zero(); m];
    for (j, &cnt) in n.iter().enumerate() {
        for _ in 0..cnt {
            let best = (0..m)
                .filter_map(|i| inst.scaled_size(i, j).map(|p| (i, &load[i] + p)))
                .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
            match best {
                Some((i, v)) => load[i] = v,
                None => return Err(SolveError::NoFeasibleAssignment),
            }
        }
    }
    Ok(load.into_iter().max().unwrap_or_else(BigRational::zero))
}

fn minimize_cmax(inst: &ScheduleInstance, opts: &SolverOptions) -> Result<(Assignment, BigRational), SolveError> {
    let n = inst.multiplicities()?;
    if inst.machines == 0 {
        return match n.iter().all(|&c| c == 0) {
            true => Ok((Assignment::zeros(0, n.len()), BigRational::zero())),
            false => Err(SolveError::NoFeasibleAssignment),
        };
    }
    let upper = greedy_makespan(inst, &n)?;
    // Candidate makespans: every scaled machine load up to the greedy bound.
    let mut candidates = BTreeSet::new();
    let mut enumerated = 0usize;
    for i in 0..inst.machines {
        let configs = enumerate_configurations(inst, i, &upper, &n);
        enumerated += configs.len();
        if enumerated > opts.max_states {
            return Err(SolveError::BudgetExceeded {
                states: enumerated,
                limit: opts.max_states,
            });
        }
        for x in configs {
            candidates.insert(machine_time(inst, i, &x)?);
        }
    }
    let candidates: Vec<BigRational> = candidates.into_iter().collect();
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    let mut best = dp_feasible_cmax_with(inst, &candidates[hi], opts)?.ok_or(SolveError::NoFeasibleAssignment)?;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match dp_feasible_cmax_with(inst, &candidates[mid], opts)? {
            Some(a) => {
                best = a;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let value = eval_makespan(inst, &best)?;
    debug_assert_eq!(value, candidates[hi]);
    Ok((best, value))
}

fn machine_value(inst: &ScheduleInstance, i: usize, x: &[u64]) -> Result<BigRational, SolveError> {
    Ok(match inst.objective {
        Objective::L2Sq => {
            let l = machine_time(inst, i, x)?;
            &l * &l
        }
        Objective::SumWc => machine_sumwc(inst, i, x)?,
        Objective::Cmax => unreachable!("makespan is not separable"),
    })
}

fn minimize_separable(inst: &ScheduleInstance, opts: &SolverOptions) -> Result<(Assignment, BigRational), SolveError> {
    let n = inst.multiplicities()?;
    let k = n.len();
    let m = inst.machines;
    if inst.objective == Objective::SumWc {
        if let Some(j) = inst.jobs.iter().position(|t| t.weight.is_none()) {
            return Err(crate::model::ModelError::MissingWeight { job: j }.into());
        }
    }
    if m == 0 {
        return match n.iter().all(|&c| c == 0) {
            true => Ok((Assignment::zeros(0, k), BigRational::zero())),
            false => Err(SolveError::NoFeasibleAssignment),
        };
    }
    let mut layers: Vec<BTreeMap<State, Back>> = Vec::with_capacity(m);
    let mut values: BTreeMap<State, BigRational> = BTreeMap::from([(vec![0; k], BigRational::zero())]);
    let mut total_states = 1usize;

    for i in 0..m {
        let later = later_machines(inst, i, None);
        let forced = later.forced();
        let sizes: Vec<Option<&BigInt>> = (0..k).map(|j| inst.size(i, j)).collect();
        let mut memo: HashMap<Vec<u64>, BigRational> = HashMap::new();
        let mut layer: BTreeMap<State, Back> = BTreeMap::new();
        let mut next_values: BTreeMap<State, BigRational> = BTreeMap::new();
        let mut failure = None;
        for (used, base) in &values {
            let rem = sub(&n, used);
            let e = Enumeration {
                sizes: &sizes,
                cap: None,
                bound: &rem,
                forced: &forced,
                proxy: None,
            };
            e.for_each(|x, _| {
                if failure.is_some() {
                    return;
                }
                let f = match memo.get(x) {
                    Some(v) => v.clone(),
                    None => match machine_value(inst, i, x) {
                        Ok(v) => {
                            memo.insert(x.to_vec(), v.clone());
                            v
                        }
                        Err(e) => {
                            failure = Some(e);
                            return;
                        }
                    },
                };
                let value = base + f;
                let next = add(used, x);
                let better = match next_values.get(&next) {
                    None => true,
                    Some(cur) => value < *cur || (value == *cur && x < layer[&next].1.as_slice()),
                };
                if better {
                    layer.insert(next.clone(), (used.clone(), x.to_vec()));
                    next_values.insert(next, value);
                }
            });
        }
        if let Some(e) = failure {
            return Err(e);
        }
        total_states += layer.len();
        if total_states > opts.max_states {
            return Err(SolveError::BudgetExceeded {
                states: total_states,
                limit: opts.max_states,
            });
        }
        layers.push(layer);
        values = next_values;
        if values.is_empty() {
            return Err(SolveError::NoFeasibleAssignment);
        }
    }
    let value = values.get(&n).cloned().ok_or(SolveError::NoFeasibleAssignment)?;
    let a = reconstruct(&layers, &n);
    debug_assert_eq!(crate::eval::eval_objective(inst, &a).ok(), Some(value.clone()));
    Ok((a, value))
}
