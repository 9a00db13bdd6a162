use crate::arith::floor_rational;
use crate::model::{Assignment, Objective, ScheduleInstance};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NFoldError {
    #[error("dimension mismatch: expected {expected} entries, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("objective {0} has no N-fold encoding here; use build_nfold_cmax")]
    Objective(&'static str),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Eq,
    Le,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Eq => "=",
            Sense::Le => "<=",
        }
    }

    pub fn holds(self, lhs: &BigInt, rhs: &BigInt) -> bool {
        match self {
            Sense::Eq => lhs == rhs,
            Sense::Le => lhs <= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Bound {
    NegInf,
    Finite(BigInt),
    PosInf,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::PosInf => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    /// `r × t` linking block.
    pub e1: Vec<Vec<BigInt>>,
    /// `s × t` local block.
    pub e2: Vec<Vec<BigInt>>,
}

/// Separable objective attached to a model with one auxiliary load variable
/// `z^i` per block (the last column of the block).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NFoldObjective {
    /// `Σ_i (z^i / s_i)²` with `speeds[i] = (numerator, denominator)`.
    L2Sq { speeds: Vec<(BigInt, BigInt)> },
    /// `Σ_i Σ_j w_j C_j` under Smith order, with per-type weights.
    SumWc { weights: Vec<BigInt> },
}

/// `min f(x)` subject to `E^(N) x (sense) b`, `l ≤ x ≤ u`, where `E^(N)` stacks
/// the linking blocks `[E₁¹ … E₁ᴺ]` over the block diagonal of the `E₂ⁱ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NFoldModel {
    pub r: usize,
    pub s: usize,
    pub t: usize,
    pub n: usize,
    pub var_names: Vec<String>,
    pub blocks: Vec<Block>,
    pub rhs: Vec<BigInt>,
    pub sense: Vec<Sense>,
    pub lb: Vec<Bound>,
    pub ub: Vec<Bound>,
    pub objective: Option<NFoldObjective>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

fn identity(k: usize, width: usize) -> Vec<Vec<BigInt>> {
    (0..k)
        .map(|j| {
            (0..width)
                .map(|c| if c == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn size_row(inst: &ScheduleInstance, i: usize) -> (Vec<BigInt>, Vec<bool>) {
    (0..inst.job_types())
        .map(|j| match inst.size(i, j) {
            Some(p) => (p.clone(), false),
            None => (BigInt::zero(), true),
        })
        .unzip()
}

fn x_names(m: usize, k: usize) -> Vec<Vec<String>> {
    (0..m)
        .map(|i| (0..k).map(|j| format!("x_{}_{}", i + 1, j + 1)).collect())
        .collect()
}

/// Makespan model: one linking row per job type, one capacity row per machine
/// with right-hand side `⌊T·s_i⌋`.
pub fn build_nfold_cmax(inst: &ScheduleInstance, t_bound: &BigRational) -> Result<NFoldModel, NFoldError> {
    let n = inst.multiplicities()?;
    let (k, m) = (inst.job_types(), inst.machines);
    let mut blocks = Vec::with_capacity(m);
    let mut lb = Vec::with_capacity(m * k);
    let mut ub = Vec::with_capacity(m * k);
    let mut rhs: Vec<BigInt> = n.iter().map(|&c| BigInt::from(c)).collect();
    let mut sense = vec![Sense::Eq; k];
    for i in 0..m {
        let (row, infinite) = size_row(inst, i);
        blocks.push(Block {
            e1: identity(k, k),
            e2: vec![row],
        });
        for j in 0..k {
            lb.push(Bound::Finite(BigInt::zero()));
            ub.push(Bound::Finite(if infinite[j] {
                BigInt::zero()
            } else {
                BigInt::from(n[j])
            }));
        }
        rhs.push(floor_rational(&(t_bound * inst.speed(i))));
        sense.push(Sense::Le);
    }
    Ok(NFoldModel {
        r: k,
        s: 1,
        t: k,
        n: m,
        var_names: x_names(m, k).concat(),
        blocks,
        rhs,
        sense,
        lb,
        ub,
        objective: None,
    })
}

/// ℓ₂² / weighted completion time model: each block gets an auxiliary
/// variable `z^i` tied to its load by `p^i·x^i − z^i = 0`, and the objective
/// stanza names the separable function of the `z^i` (and weights).
pub fn build_nfold_objective(inst: &ScheduleInstance) -> Result<NFoldModel, NFoldError> {
    let n = inst.multiplicities()?;
    let (k, m) = (inst.job_types(), inst.machines);
    let objective = match inst.objective {
        Objective::Cmax => return Err(NFoldError::Objective("cmax")),
        Objective::L2Sq => NFoldObjective::L2Sq {
            speeds: (0..m)
                .map(|i| {
                    let s = inst.speed(i);
                    (s.numer().clone(), s.denom().clone())
                })
                .collect(),
        },
        Objective::SumWc => NFoldObjective::SumWc {
            weights: (0..k).map(|j| inst.weight(j).cloned()).collect::<Result<_, _>>()?,
        },
    };
    let mut blocks = Vec::with_capacity(m);
    let mut names = Vec::with_capacity(m * (k + 1));
    let mut lb = Vec::new();
    let mut ub = Vec::new();
    let mut rhs: Vec<BigInt> = n.iter().map(|&c| BigInt::from(c)).collect();
    let mut sense = vec![Sense::Eq; k];
    for (i, xs) in x_names(m, k).into_iter().enumerate() {
        let (mut row, infinite) = size_row(inst, i);
        row.push(-BigInt::one());
        blocks.push(Block {
            e1: identity(k, k + 1),
            e2: vec![row],
        });
        names.extend(xs);
        names.push(format!("z_{}", i + 1));
        for j in 0..k {
            lb.push(Bound::Finite(BigInt::zero()));
            ub.push(Bound::Finite(if infinite[j] {
                BigInt::zero()
            } else {
                BigInt::from(n[j])
            }));
        }
        lb.push(Bound::Finite(BigInt::zero()));
        ub.push(Bound::PosInf);
        rhs.push(BigInt::zero());
        sense.push(Sense::Eq);
    }
    Ok(NFoldModel {
        r: k,
        s: 1,
        t: k + 1,
        n: m,
        var_names: names,
        blocks,
        rhs,
        sense,
        lb,
        ub,
        objective: Some(objective),
    })
}

impl NFoldModel {
    pub fn num_vars(&self) -> usize {
        self.n * self.t
    }

    pub fn num_rows(&self) -> usize {
        self.r + self.n * self.s
    }

    /// Solution vector for `a`: the flattened counts, plus `z^i = p^i·x^i` for
    /// objective models.
    pub fn solution_vector(&self, inst: &ScheduleInstance, a: &Assignment) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(self.num_vars());
        for (i, x) in a.counts.iter().enumerate() {
            out.extend(x.iter().map(|&c| BigInt::from(c)));
            if self.t == x.len() + 1 {
                let z: BigInt = x
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| inst.size(i, j).map_or_else(BigInt::zero, |p| p * BigInt::from(c)))
                    .sum();
                out.push(z);
            }
        }
        out
    }

    /// Row activities `E^(N) x`.
    pub fn activities(&self, x: &[BigInt]) -> Result<Vec<BigInt>, NFoldError> {
        if x.len() != self.num_vars() {
            return Err(NFoldError::Dimension {
                expected: self.num_vars(),
                found: x.len(),
            });
        }
        let mut act = vec![BigInt::zero(); self.num_rows()];
        for (i, block) in self.blocks.iter().enumerate() {
            let xi = &x[i * self.t..(i + 1) * self.t];
            for (q, row) in block.e1.iter().enumerate() {
                act[q] += dot(row, xi);
            }
            for (q, row) in block.e2.iter().enumerate() {
                act[self.r + i * self.s + q] += dot(row, xi);
            }
        }
        Ok(act)
    }

    pub fn check_solution(&self, x: &[BigInt]) -> Result<CheckReport, NFoldError> {
        let act = self.activities(x)?;
        let mut violations = Vec::new();
        for (row, lhs) in act.iter().enumerate() {
            let (rhs, sense) = (&self.rhs[row], self.sense[row]);
            if sense.holds(lhs, rhs) {
                continue;
            }
            let what = if row < self.r {
                format!("linking row {} violated", row + 1)
            } else {
                let (i, q) = ((row - self.r) / self.s, (row - self.r) % self.s);
                format!("block {} row {} violated", i + 1, q + 1)
            };
            violations.push(format!("{what}: {lhs} {} {rhs} fails", sense.symbol()));
        }
        for (v, value) in x.iter().enumerate() {
            let low = match &self.lb[v] {
                Bound::Finite(l) => value < l,
                Bound::PosInf => true,
                Bound::NegInf => false,
            };
            let high = match &self.ub[v] {
                Bound::Finite(u) => value > u,
                Bound::NegInf => true,
                Bound::PosInf => false,
            };
            if low || high {
                violations.push(format!(
                    "bound: {} = {value} outside [{}, {}]",
                    self.var_names[v], self.lb[v], self.ub[v]
                ));
            }
        }
        Ok(CheckReport {
            ok: violations.is_empty(),
            violations,
        })
    }

    /// The full `(r + N·s) × N·t` constraint matrix.
    pub fn dense_matrix(&self) -> Vec<Vec<BigInt>> {
        let mut dense = vec![vec![BigInt::zero(); self.num_vars()]; self.num_rows()];
        for (i, block) in self.blocks.iter().enumerate() {
            for (q, row) in block.e1.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    dense[q][i * self.t + c] = v.clone();
                }
            }
            for (q, row) in block.e2.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    dense[self.r + i * self.s + q][i * self.t + c] = v.clone();
                }
            }
        }
        dense
    }

    /// Equivalent model with only equality rows: every `<=` block row gets a
    /// nonnegative slack column in its block. Linking rows must be equalities.
    pub fn standard_form(&self) -> NFoldModel {
        assert!(
            self.sense[..self.r].iter().all(|&s| s == Sense::Eq),
            "linking rows must be equalities"
        );
        let extra = self.s;
        let t2 = self.t + extra;
        let mut blocks = Vec::with_capacity(self.n);
        let mut names = Vec::new();
        let mut lb = Vec::new();
        let mut ub = Vec::new();
        for (i, block) in self.blocks.iter().enumerate() {
            let e1 = block
                .e1
                .iter()
                .map(|row| row.iter().cloned().chain((0..extra).map(|_| BigInt::zero())).collect())
                .collect();
            let e2 = block
                .e2
                .iter()
                .enumerate()
                .map(|(q, row)| {
                    let le = self.sense[self.r + i * self.s + q] == Sense::Le;
                    row.iter()
                        .cloned()
                        .chain((0..extra).map(|c| if c == q && le { BigInt::one() } else { BigInt::zero() }))
                        .collect()
                })
                .collect();
            blocks.push(Block { e1, e2 });
            let range = i * self.t..(i + 1) * self.t;
            names.extend(self.var_names[range.clone()].iter().cloned());
            lb.extend(self.lb[range.clone()].iter().cloned());
            ub.extend(self.ub[range].iter().cloned());
            for q in 0..extra {
                names.push(format!("slack_{}_{}", i + 1, q + 1));
                lb.push(Bound::Finite(BigInt::zero()));
                let le = self.sense[self.r + i * self.s + q] == Sense::Le;
                ub.push(if le {
                    Bound::PosInf
                } else {
                    Bound::Finite(BigInt::zero())
                });
            }
        }
        NFoldModel {
            r: self.r,
            s: self.s,
            t: t2,
            n: self.n,
            var_names: names,
            blocks,
            rhs: self.rhs.clone(),
            sense: vec![Sense::Eq; self.num_rows()],
            lb,
            ub,
            objective: self.objective.clone(),
        }
    }
}

fn dot(row: &[BigInt], x: &[BigInt]) -> BigInt {
    row.iter().zip(x).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::model::{JobType, Size};

    fn tiny() -> ScheduleInstance {
        ScheduleInstance::identical(2, vec![JobType::new(3, 2), JobType::new(5, 1)])
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn tiny_model() {
        let model = build_nfold_cmax(&tiny(), &ratio(6, 1)).unwrap();
        assert_eq!((model.r, model.s, model.t, model.n), (2, 1, 2, 2));
        assert_eq!(model.blocks[0].e2, vec![big(&[3, 5])]);
        assert_eq!(model.blocks[1].e2, vec![big(&[3, 5])]);
        assert_eq!(model.rhs, big(&[2, 1, 6, 6]));
        assert_eq!(model.var_names.len(), 4);

        let ok = model.check_solution(&big(&[2, 0, 0, 1])).unwrap();
        assert!(ok.ok, "{:?}", ok.violations);
        let zero = model.check_solution(&big(&[0, 0, 0, 0])).unwrap();
        assert!(!zero.ok);
        assert!(zero.violations[0].starts_with("linking row 1 violated"));
        let over = model.check_solution(&big(&[3, 0, -1, 1])).unwrap();
        assert!(over.violations.iter().any(|v| v.starts_with("bound")));
        assert!(model.check_solution(&big(&[1])).is_err());
    }

    #[test]
    fn uniform_capacity_is_floored() {
        let inst = ScheduleInstance::uniform(vec![ratio(3, 2), ratio(1, 1)], vec![JobType::new(2, 1)]);
        let model = build_nfold_cmax(&inst, &ratio(5, 1)).unwrap();
        assert_eq!(model.rhs, big(&[1, 7, 5]));
    }

    #[test]
    fn zero_job_types_give_an_empty_model() {
        let inst = ScheduleInstance::identical(2, vec![]);
        let model = build_nfold_cmax(&inst, &ratio(1, 1)).unwrap();
        assert_eq!((model.r, model.t), (0, 0));
        assert!(model.check_solution(&[]).unwrap().ok);
    }

    #[test]
    fn infinite_sizes_get_zero_upper_bounds() {
        let inst = ScheduleInstance::unrelated(2, vec![JobType::per_machine(vec![Size::Infinite, 2.into()], 3)]);
        let model = build_nfold_cmax(&inst, &ratio(10, 1)).unwrap();
        assert_eq!(model.ub[0], Bound::Finite(BigInt::zero()));
        assert_eq!(model.ub[1], Bound::Finite(BigInt::from(3)));
        assert!(model.check_solution(&big(&[0, 3])).unwrap().ok);
        assert!(!model.check_solution(&big(&[1, 2])).unwrap().ok);
    }

    #[test]
    fn block_pattern_and_standard_form() {
        let inst = ScheduleInstance::identical(3, vec![JobType::new(3, 2), JobType::new(5, 1)]);
        let model = build_nfold_cmax(&inst, &ratio(6, 1)).unwrap();
        let dense = model.dense_matrix();
        for (row, cells) in dense.iter().enumerate() {
            for (col, v) in cells.iter().enumerate() {
                let in_band = row < model.r || (row - model.r) / model.s == col / model.t;
                assert!(in_band || v.is_zero(), "({row},{col})");
            }
        }
        let std = model.standard_form();
        assert_eq!(std.t, 3);
        assert!(std.sense.iter().all(|&s| s == Sense::Eq));
        // x = [[2,0],[0,1],[0,0]] with slacks 0, 1, 6
        let x = big(&[2, 0, 0, 0, 1, 1, 0, 0, 6]);
        assert!(std.check_solution(&x).unwrap().ok);
    }

    #[test]
    fn objective_model_ties_loads() {
        let inst = tiny().with_objective(Objective::L2Sq);
        let model = build_nfold_objective(&inst).unwrap();
        assert_eq!(model.t, 3);
        let a = Assignment::new(vec![vec![2, 0], vec![0, 1]]);
        let x = model.solution_vector(&inst, &a);
        assert_eq!(x, big(&[2, 0, 6, 0, 1, 5]));
        assert!(model.check_solution(&x).unwrap().ok);
        assert!(build_nfold_objective(&tiny()).is_err());
    }
}
