//! Exhaustive search over all complete assignments.
//!
//! Each job type's multiplicity is split into `m` parts independently; the
//! cartesian product of those compositions is every assignment. Values come
//! from the evaluators in `eval`, so this shares no logic with the DP.

use super::{SolveError, SolverOptions};
use crate::eval::{eval_objective, EvalError};
use crate::model::{Assignment, ScheduleInstance};
use num_rational::BigRational;

/// All ways to write `n` as an ordered sum of `m` nonnegative parts.
fn compositions(n: u64, m: usize) -> Vec<Vec<u64>> {
    if m == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut cur = vec![0u64; m];
    fn rec(i: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for c in 0..=left {
            cur[i] = c;
            rec(i + 1, left - c, cur, out);
        }
    }
    rec(0, n, &mut cur, &mut out);
    out
}

fn budget(n: &[u64], m: usize) -> Option<u128> {
    let mut total: u128 = 1;
    for &c in n {
        for _ in 0..m {
            total = total.checked_mul(c as u128 + 1)?;
        }
    }
    Some(total)
}

pub fn brute_force_solve(inst: &ScheduleInstance) -> Result<(Assignment, BigRational), SolveError> {
    brute_force_solve_with(inst, &SolverOptions::default())
}

pub fn brute_force_solve_with(
    inst: &ScheduleInstance,
    opts: &SolverOptions,
) -> Result<(Assignment, BigRational), SolveError> {
    let n = inst.multiplicities()?;
    let m = inst.machines;
    let k = n.len();
    match budget(&n, m) {
        Some(b) if b <= opts.max_states as u128 => {}
        other => {
            return Err(SolveError::BudgetExceeded {
                states: other.map_or(usize::MAX, |b| b.min(usize::MAX as u128) as usize),
                limit: opts.max_states,
            })
        }
    }
    let per_type: Vec<Vec<Vec<u64>>> = n.iter().map(|&c| compositions(c, m)).collect();
    if per_type.iter().any(Vec::is_empty) {
        return Err(SolveError::NoFeasibleAssignment);
    }

    let mut best: Option<(Assignment, BigRational)> = None;
    let mut idx = vec![0usize; k];
    loop {
        let counts: Vec<Vec<u64>> = (0..m)
            .map(|i| (0..k).map(|j| per_type[j][idx[j]][i]).collect())
            .collect();
        let a = Assignment::new(counts);
        match eval_objective(inst, &a) {
            Ok(v) => {
                if best.as_ref().is_none_or(|(_, b)| v < *b) {
                    best = Some((a, v));
                }
            }
            Err(EvalError::InfiniteSize { .. }) => {}
            Err(e) => return Err(e.into()),
        }
        // odometer over the per-type composition lists
        let mut j = 0;
        loop {
            if j == k {
                return best.ok_or(SolveError::NoFeasibleAssignment);
            }
            idx[j] += 1;
            if idx[j] < per_type[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}
