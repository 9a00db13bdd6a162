//! Minimum-cost cutting stock for small instances.
//!
//! Memoized recursion over the vector of items still to be packed. Each step
//! buys one bin and fills it with a configuration that is maximal for the
//! remaining items: with nonnegative costs, moving items forward into an
//! earlier bin never hurts, so some optimum uses only such steps.

use super::config::Enumeration;
use super::packing::assign_items;
use super::{SolveError, SolverOptions};
use crate::reductions::CuttingStockInstance;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedBin {
    pub bin_type: usize,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuttingStockSolution {
    pub purchases: Vec<u64>,
    pub bins: Vec<PackedBin>,
    pub cost: BigInt,
}

impl CuttingStockSolution {
    /// Checks capacities, item totals and the stated cost against `inst`.
    pub fn is_valid_for(&self, inst: &CuttingStockInstance) -> bool {
        let k = inst.item_types();
        let mut used = vec![0u64; k];
        let mut bought = vec![0u64; inst.bin_types()];
        let mut cost = BigInt::zero();
        for b in &self.bins {
            if b.bin_type >= inst.bin_types() || b.counts.len() != k {
                return false;
            }
            let load: BigInt = (0..k).map(|j| &inst.item_sizes[j] * BigInt::from(b.counts[j])).sum();
            if load > inst.bin_sizes[b.bin_type] {
                return false;
            }
            for (u, c) in used.iter_mut().zip(&b.counts) {
                *u += c;
            }
            bought[b.bin_type] += 1;
            cost += &inst.bin_costs[b.bin_type];
        }
        used == inst.item_counts && bought == self.purchases && cost == self.cost
    }
}

fn check_items_fit(inst: &CuttingStockInstance) -> Result<(), SolveError> {
    inst.validate().map_err(|_| SolveError::NoFeasibleAssignment)?;
    for j in 0..inst.item_types() {
        if inst.item_counts[j] > 0 && inst.bin_sizes.iter().all(|s| s < &inst.item_sizes[j]) {
            return Err(SolveError::Infeasible { item: j });
        }
    }
    Ok(())
}

pub fn cuttingstock_solve(inst: &CuttingStockInstance) -> Result<CuttingStockSolution, SolveError> {
    cuttingstock_solve_with(inst, &SolverOptions::default())
}

pub fn cuttingstock_solve_with(
    inst: &CuttingStockInstance,
    opts: &SolverOptions,
) -> Result<CuttingStockSolution, SolveError> {
    check_items_fit(inst)?;
    let mut solver = Memo {
        inst,
        limit: opts.max_states,
        table: HashMap::new(),
    };
    solver.cost(&inst.item_counts)?;

    let mut purchases = vec![0u64; inst.bin_types()];
    let mut bins = Vec::new();
    let mut rem = inst.item_counts.clone();
    while rem.iter().any(|&r| r > 0) {
        let (_, choice) = &solver.table[&rem];
        let (b, x) = choice.clone().expect("nonempty state has a choice");
        purchases[b] += 1;
        rem = rem.iter().zip(&x).map(|(r, c)| r - c).collect();
        bins.push(PackedBin { bin_type: b, counts: x });
    }
    let cost = solver.table[&inst.item_counts].0.clone();
    let sol = CuttingStockSolution { purchases, bins, cost };
    debug_assert!(sol.is_valid_for(inst));
    Ok(sol)
}

type Entry = (BigInt, Option<(usize, Vec<u64>)>);

struct Memo<'a> {
    inst: &'a CuttingStockInstance,
    limit: usize,
    table: HashMap<Vec<u64>, Entry>,
}

impl Memo<'_> {
    fn maximal_configs(&self, b: usize, rem: &[u64]) -> Vec<Vec<u64>> {
        let inst = self.inst;
        let sizes: Vec<Option<&BigInt>> = inst.item_sizes.iter().map(Some).collect();
        let forced = vec![false; rem.len()];
        let e = Enumeration {
            sizes: &sizes,
            cap: Some(&inst.bin_sizes[b]),
            bound: rem,
            forced: &forced,
            proxy: None,
        };
        let mut out = Vec::new();
        e.for_each(|x, load| {
            if x.iter().all(|&c| c == 0) {
                return;
            }
            let slack = &inst.bin_sizes[b] - load;
            let maximal = (0..rem.len()).all(|j| x[j] == rem[j] || inst.item_sizes[j] > slack);
            if maximal {
                out.push(x.to_vec());
            }
        });
        out
    }

    fn cost(&mut self, rem: &[u64]) -> Result<Option<BigInt>, SolveError> {
        if let Some((c, choice)) = self.table.get(rem) {
            return Ok((choice.is_some() || rem.iter().all(|&r| r == 0)).then(|| c.clone()));
        }
        if rem.iter().all(|&r| r == 0) {
            self.table.insert(rem.to_vec(), (BigInt::zero(), None));
            return Ok(Some(BigInt::zero()));
        }
        let mut best: Option<(BigInt, (usize, Vec<u64>))> = None;
        for b in 0..self.inst.bin_types() {
            for x in self.maximal_configs(b, rem) {
                let next: Vec<u64> = rem.iter().zip(&x).map(|(r, c)| r - c).collect();
                if let Some(sub) = self.cost(&next)? {
                    let total = sub + &self.inst.bin_costs[b];
                    if best.as_ref().is_none_or(|(c, _)| &total < c) {
                        best = Some((total, (b, x)));
                    }
                }
            }
        }
        if self.table.len() >= self.limit {
            return Err(SolveError::BudgetExceeded {
                states: self.table.len() + 1,
                limit: self.limit,
            });
        }
        let value = best.as_ref().map(|(c, _)| c.clone());
        let entry = match best {
            Some((c, choice)) => (c, Some(choice)),
            None => (BigInt::zero(), None),
        };
        self.table.insert(rem.to_vec(), entry);
        Ok(value)
    }
}

/// Reference optimum: tries every purchase vector with at most one bin per
/// item, cheapest first, and checks packability by backtracking over the
/// individual items.
pub fn cuttingstock_brute_force(inst: &CuttingStockInstance, opts: &SolverOptions) -> Result<BigInt, SolveError> {
    check_items_fit(inst)?;
    let items: Vec<BigInt> = (0..inst.item_types())
        .flat_map(|j| std::iter::repeat_n(inst.item_sizes[j].clone(), inst.item_counts[j] as usize))
        .collect();
    let n = items.len();
    let m = inst.bin_types();
    let mut vectors: Vec<(BigInt, Vec<u64>)> = Vec::new();
    let mut cur = vec![0u64; m];
    fn rec(
        b: usize,
        left: u64,
        cur: &mut Vec<u64>,
        costs: &[BigInt],
        out: &mut Vec<(BigInt, Vec<u64>)>,
        limit: usize,
    ) -> bool {
        if b == cur.len() {
            let c = cur.iter().zip(costs).map(|(&x, c)| c * BigInt::from(x)).sum();
            out.push((c, cur.clone()));
            return out.len() <= limit;
        }
        for x in 0..=left {
            cur[b] = x;
            if !rec(b + 1, left - x, cur, costs, out, limit) {
                return false;
            }
        }
        cur[b] = 0;
        true
    }
    if !rec(0, n as u64, &mut cur, &inst.bin_costs, &mut vectors, opts.max_states) {
        return Err(SolveError::BudgetExceeded {
            states: vectors.len(),
            limit: opts.max_states,
        });
    }
    vectors.sort();
    for (cost, x) in vectors {
        let caps: Vec<BigInt> = (0..m)
            .flat_map(|b| std::iter::repeat_n(inst.bin_sizes[b].clone(), x[b] as usize))
            .collect();
        if assign_items(&items, &caps, None).is_some() {
            return Ok(cost);
        }
    }
    Err(SolveError::NoFeasibleAssignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn example() -> CuttingStockInstance {
        CuttingStockInstance::new(big(&[2]), vec![3], big(&[4, 2]), big(&[3, 2])).unwrap()
    }

    #[test]
    fn small_example() {
        // Oracle: every purchase (a, b) with cost 3a + 2b <= 6 and capacity 4a + 2b >= 6.
        let mut best = None;
        for a in 0..=2i64 {
            for b in 0..=3i64 {
                let cost = 3 * a + 2 * b;
                if cost <= 6 && 2 * a + b >= 3 {
                    best = Some(best.map_or(cost, |c: i64| c.min(cost)));
                }
            }
        }
        assert_eq!(best, Some(5));
        let sol = cuttingstock_solve(&example()).unwrap();
        assert_eq!(sol.cost, BigInt::from(5));
        assert_eq!(sol.purchases, vec![1, 1]);
        assert!(sol.is_valid_for(&example()));
        assert_eq!(
            cuttingstock_brute_force(&example(), &SolverOptions::default()).unwrap(),
            BigInt::from(5)
        );
    }

    #[test]
    fn empty_and_infeasible() {
        let empty = CuttingStockInstance::new(vec![], vec![], big(&[4]), big(&[1])).unwrap();
        let sol = cuttingstock_solve(&empty).unwrap();
        assert_eq!(sol.cost, BigInt::zero());
        assert_eq!(sol.purchases, vec![0]);
        assert!(sol.bins.is_empty());

        let too_big = CuttingStockInstance::new(big(&[5]), vec![1], big(&[4, 4]), big(&[1, 1])).unwrap();
        assert_eq!(cuttingstock_solve(&too_big), Err(SolveError::Infeasible { item: 0 }));
    }

    #[test]
    fn mixed_items_match_brute_force() {
        let inst = CuttingStockInstance::new(big(&[3, 2, 1]), vec![2, 2, 3], big(&[5, 4, 7]), big(&[4, 3, 6])).unwrap();
        let sol = cuttingstock_solve(&inst).unwrap();
        assert!(sol.is_valid_for(&inst));
        assert_eq!(
            sol.cost,
            cuttingstock_brute_force(&inst, &SolverOptions::default()).unwrap()
        );
    }
}
