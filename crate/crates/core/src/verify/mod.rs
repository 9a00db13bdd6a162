//! Soundness sweeps: enumerate or sample source instances, reduce, solve
//! both sides exactly and record every disagreement.

pub mod generate;
mod report;

pub use report::{Check, Counterexample, SweepRecord, SweepReport, SweepSummary, Verdict};

use crate::eval::{eval_makespan, eval_objective, eval_sumwc_closed, eval_sumwc_sim, loads};
use crate::format::{digest, Document};
use crate::model::{Assignment, MachineModel, Objective, ScheduleInstance};
use crate::nfold::{build_nfold_cmax, parse_text, to_text};
use crate::reductions::{
    bp_to_bbp, l2_speed, l2_speed_bound_holds, packing_from_perfect_schedule, perfect_schedule, q_to_cutting_stock,
    rank2_matches, reduce_bbp, BalancedBinPackingInstance, BinPackingInstance, Family, JobRole, ReductionCertificate,
};
use crate::solvers::{
    brute_force_solve_with, cuttingstock_brute_force, cuttingstock_solve_with, dp_feasible_cmax_with, dp_minimize_with,
    SolveError, SolverOptions,
};
use generate::Planted;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use std::time::Instant;
use thiserror::Error;

/// How source instances are produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    /// Every item sequence with length in `min_items..=max_items` and sizes
    /// in `1..=max_size`, for each bin count. For `q2cs` the same bounds
    /// describe two-machine toy instances (job multiplicity and size).
    Exhaustive {
        bins: Vec<usize>,
        min_items: usize,
        max_items: usize,
        max_size: u64,
    },
    /// `trials` seeded samples with `items` items over `bins` bins.
    Randomized {
        trials: usize,
        seed: u64,
        bins: usize,
        items: usize,
        max_size: u64,
    },
    /// Scheduling instances for the solver sweep: every machine count,
    /// type count and multiplicity vector within the bounds, for every
    /// machine model and objective. With `sample`, only that many grid
    /// points are drawn at random.
    Grid {
        max_machines: usize,
        max_types: usize,
        max_total: u64,
        max_size: u64,
        max_weight: u64,
        seed: u64,
        sample: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    /// Reduction family; `None` for the solver sweep.
    pub family: Option<Family>,
    pub generator: Generator,
    /// Only affects `bp2bbp`: when false, each sequence is also tried with
    /// the smallest capacity that could fit it, which is generally not tight.
    pub tight_only: bool,
    pub budget: SolverOptions,
    /// Record wall-clock milliseconds per instance; off gives byte-identical CSVs.
    pub timing: bool,
}

impl SweepSpec {
    pub fn new(family: Option<Family>, generator: Generator) -> Self {
        SweepSpec {
            family,
            generator,
            tight_only: true,
            budget: SolverOptions::default(),
            timing: true,
        }
    }

    fn family_tag(&self) -> String {
        self.family
            .map_or_else(|| "solver".to_string(), |f| f.tag().to_string())
    }

    fn validate(&self) -> Result<(), SweepError> {
        let bad = |msg: &str| Err(SweepError::Invalid(msg.to_string()));
        match &self.generator {
            Generator::Exhaustive {
                bins,
                min_items,
                max_items,
                max_size,
            } => {
                if bins.is_empty() || bins.contains(&0) || *max_size == 0 || *min_items == 0 || min_items > max_items {
                    return bad("exhaustive bounds must be positive with min_items ≤ max_items");
                }
            }
            Generator::Randomized {
                bins, items, max_size, ..
            } => {
                if *bins == 0 || *items == 0 || *max_size == 0 {
                    return bad("randomized bounds must be positive");
                }
            }
            Generator::Grid {
                max_machines,
                max_types,
                max_size,
                ..
            } => {
                if *max_machines == 0 || *max_types == 0 || *max_size == 0 {
                    return bad("grid bounds must be positive");
                }
            }
        }
        if self.budget.max_states == 0 {
            return bad("state budget must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("{sweep} sweep does not accept family {family}")]
    Unsupported { sweep: &'static str, family: String },
    #[error("invalid sweep: {0}")]
    Invalid(String),
}

fn timed(timing: bool, f: impl FnOnce() -> SweepRecord) -> SweepRecord {
    let start = Instant::now();
    let mut r = f();
    if timing {
        r.wall_ms = start.elapsed().as_millis() as u64;
    }
    r
}

fn run<T: Sync>(spec: &SweepSpec, items: &[T], f: impl Fn(&T) -> SweepRecord + Sync) -> Vec<SweepRecord> {
    items.par_iter().map(|x| timed(spec.timing, || f(x))).collect()
}

// ---------------------------------------------------------------------------
// Source generation

/// Bin packing sources as `(items, bins, capacity)`.
fn packing_sources(spec: &SweepSpec, balanced: bool) -> Result<Vec<(Vec<u64>, usize, u64)>, SweepError> {
    let mut out = Vec::new();
    match &spec.generator {
        Generator::Exhaustive {
            bins,
            min_items,
            max_items,
            max_size,
        } => {
            for &k in bins {
                for len in *min_items..=*max_items {
                    if balanced && len % k != 0 {
                        continue;
                    }
                    for seq in generate::all_sequences(len, *max_size) {
                        let sum: u64 = seq.iter().sum();
                        let a_max = *seq.iter().max().expect("len ≥ 1");
                        let kk = k as u64;
                        if sum.is_multiple_of(kk) && a_max <= sum / kk {
                            out.push((seq, k, sum / kk));
                        } else if !spec.tight_only && !balanced {
                            out.push((seq, k, sum.div_ceil(kk).max(a_max)));
                        }
                    }
                }
            }
        }
        Generator::Randomized {
            trials,
            seed,
            bins,
            items,
            max_size,
        } => {
            if balanced && items % bins != 0 {
                return Err(SweepError::Invalid(format!(
                    "{items} items are not divisible by {bins} bins"
                )));
            }
            let mut rng = generate::rng(*seed);
            for _ in 0..*trials {
                let (seq, cap) = generate::random_tight(&mut rng, *bins, *items, *max_size);
                out.push((seq, *bins, cap));
            }
        }
        Generator::Grid { .. } => {
            return Err(SweepError::Invalid(
                "grid generator is only for the solver sweep".into(),
            ));
        }
    }
    Ok(out)
}

fn toy_sources(spec: &SweepSpec) -> Result<Vec<ScheduleInstance>, SweepError> {
    const HORIZONS: [i64; 3] = [2, 4, 6];
    let mut out = Vec::new();
    match &spec.generator {
        Generator::Exhaustive {
            min_items,
            max_items,
            max_size,
            ..
        } => {
            for speeds in generate::speed_pairs() {
                for p in 1..=*max_size {
                    for n in *min_items..=*max_items {
                        for t in HORIZONS {
                            out.push(generate::toy_uniform(speeds, &[(p, n as u64)], t));
                        }
                    }
                }
            }
        }
        Generator::Randomized {
            trials,
            seed,
            items,
            max_size,
            ..
        } => {
            use rand::Rng;
            let mut rng = generate::rng(*seed);
            for _ in 0..*trials {
                let speeds = generate::random_speed_pair(&mut rng);
                let types = rng.gen_range(1..=2usize);
                let jobs: Vec<(u64, u64)> = (0..types)
                    .map(|_| (rng.gen_range(1..=*max_size), rng.gen_range(1..=*items as u64)))
                    .collect();
                let t = HORIZONS[rng.gen_range(0..HORIZONS.len())];
                out.push(generate::toy_uniform(speeds, &jobs, t));
            }
        }
        Generator::Grid { .. } => {
            return Err(SweepError::Invalid(
                "grid generator is only for the solver sweep".into(),
            ));
        }
    }
    Ok(out)
}

fn planted_sources(spec: &SweepSpec) -> Result<Vec<Planted>, SweepError> {
    match &spec.generator {
        Generator::Randomized {
            trials,
            seed,
            bins,
            items,
            max_size,
        } => {
            if items % bins != 0 {
                return Err(SweepError::Invalid(format!(
                    "{items} items are not divisible by {bins} bins"
                )));
            }
            let mut rng = generate::rng(*seed);
            Ok((0..*trials)
                .map(|_| generate::planted_balanced(&mut rng, *bins, items / bins, *max_size))
                .collect())
        }
        Generator::Exhaustive { .. } => {
            // Every feasible tight instance, paired with the packing the search finds.
            let spec_b = SweepSpec {
                tight_only: true,
                ..spec.clone()
            };
            Ok(packing_sources(&spec_b, true)?
                .into_iter()
                .filter_map(|(items, k, cap)| {
                    let packing = BalancedBinPackingInstance::new(items.clone(), k, cap).ok()?.solve()?;
                    Some(Planted {
                        items,
                        capacity: cap,
                        packing,
                    })
                })
                .collect())
        }
        Generator::Grid { .. } => Err(SweepError::Invalid(
            "grid generator is only for the solver sweep".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Round trips

/// Reduces every generated source and compares feasibility on both sides.
pub fn roundtrip_check(spec: &SweepSpec) -> Result<SweepReport, SweepError> {
    spec.validate()?;
    let family = match spec.family {
        Some(f @ (Family::Bp2Bbp | Family::Bbp2QCmax | Family::Bbp2RCmax | Family::Bbp2RCmax4 | Family::Q2Cs)) => f,
        _ => {
            return Err(SweepError::Unsupported {
                sweep: "roundtrip",
                family: spec.family_tag(),
            })
        }
    };
    let records = match family {
        Family::Bp2Bbp => {
            let sources = packing_sources(spec, false)?;
            run(spec, &sources, |(items, k, cap)| roundtrip_bp(items, *k, *cap))
        }
        Family::Q2Cs => {
            let sources = toy_sources(spec)?;
            run(spec, &sources, |q| roundtrip_q2cs(q, &spec.budget))
        }
        _ => {
            let sources = packing_sources(spec, true)?;
            run(spec, &sources, |(items, k, cap)| {
                let bbp =
                    BalancedBinPackingInstance::new(items.clone(), *k, *cap).expect("generator emits balanced shapes");
                roundtrip_schedule(family, &bbp, &spec.budget)
            })
        }
    };
    Ok(SweepReport::new("roundtrip", family.tag().to_string(), records))
}

fn roundtrip_bp(items: &[u64], k: usize, cap: u64) -> SweepRecord {
    let bp = BinPackingInstance::new(items.to_vec(), k, cap).expect("generator emits valid bin packing instances");
    let d = digest(&Document::BinPacking(bp.clone()));
    let src = bp.solve().is_some();
    let bbp = bp_to_bbp(&bp);
    let red = bbp.solve();
    let mut checks = vec![Check::with_detail(
        "equivalence",
        src == red.is_some(),
        format!("source {src}, reduced {}", red.is_some()),
    )];
    if let Some(map) = &red {
        checks.push(Check::new("packing", bbp.is_valid_packing(map)));
    }
    SweepRecord::from_checks(d, Family::Bp2Bbp.tag().into(), Some(src), Some(red.is_some()), checks)
}

/// Round trip of one balanced instance through a makespan family. Besides
/// feasibility equivalence this checks that any schedule the DP finds is
/// perfect and satisfies the exported N-fold model, and that rank-2 and
/// radix certificates are consistent.
pub fn roundtrip_schedule(family: Family, bbp: &BalancedBinPackingInstance, opts: &SolverOptions) -> SweepRecord {
    let d = digest(&Document::BalancedBinPacking(bbp.clone()));
    let tag = family.tag().to_string();
    let src = bbp.solve().is_some();
    let (inst, cert) = match reduce_bbp(family, bbp) {
        Ok(x) => x,
        Err(e) => {
            return SweepRecord::from_checks(
                d,
                tag,
                Some(src),
                None,
                vec![Check::with_detail("reduce", false, e.to_string())],
            )
        }
    };
    let mut checks = Vec::new();
    if cert.rank2.is_some() {
        checks.push(Check::new("rank2", rank2_matches(&inst, &cert)));
    }
    if family == Family::Bbp2QCmax {
        checks.push(carry_check(&inst, Some(&cert)));
    }
    let found = match dp_feasible_cmax_with(&inst, &cert.target, opts) {
        Ok(x) => x,
        Err(e @ SolveError::BudgetExceeded { .. }) => return SweepRecord::skipped(d, tag, Some(src), e.to_string()),
        Err(e) => {
            checks.push(Check::with_detail("solve", false, e.to_string()));
            return SweepRecord::from_checks(d, tag, Some(src), None, checks);
        }
    };
    checks.push(Check::with_detail(
        "equivalence",
        src == found.is_some(),
        format!("source {src}, reduced {}", found.is_some()),
    ));
    if let Some(a) = &found {
        checks.push(match packing_from_perfect_schedule(&cert, a) {
            Ok(map) => Check::new("perfect", bbp.is_valid_packing(&map)),
            Err(e) => Check::with_detail("perfect", false, e.to_string()),
        });
        checks.push(Check::new(
            "makespan",
            eval_makespan(&inst, a).is_ok_and(|v| v <= cert.target),
        ));
        checks.extend(nfold_checks(&inst, &cert.target, a));
    }
    SweepRecord::from_checks(d, tag, Some(src), Some(found.is_some()), checks)
}

/// The assignment satisfies the exported makespan model, and the model's
/// text form survives a parse/print cycle unchanged.
pub fn nfold_checks(inst: &ScheduleInstance, target: &BigRational, a: &Assignment) -> Vec<Check> {
    let model = match build_nfold_cmax(inst, target) {
        Ok(m) => m,
        Err(e) => return vec![Check::with_detail("nfold", false, e.to_string())],
    };
    let x = model.solution_vector(inst, a);
    let sat = match model.check_solution(&x) {
        Ok(r) => Check::with_detail("nfold", r.ok, r.violations.join("; ")),
        Err(e) => Check::with_detail("nfold", false, e.to_string()),
    };
    let text = to_text(&model);
    let text_ok = parse_text(&text).is_ok_and(|back| back == model && to_text(&back) == text);
    vec![sat, Check::new("nfold_text", text_ok)]
}

/// Digit-wise carry-freeness of the cutting stock encoding of `q`.
pub fn carry_check(q: &ScheduleInstance, source: Option<&ReductionCertificate>) -> Check {
    let (cs, cert) = match q_to_cutting_stock(q, source) {
        Ok(x) => x,
        Err(e) => return Check::with_detail("carry", false, e.to_string()),
    };
    let Some((k1, k2)) = cert.radix.clone() else {
        return Check::with_detail("carry", false, "no radix");
    };
    let t = q.target.clone().expect("q2cs requires a target");
    let mut caps = Vec::new();
    for i in 0..q.machines {
        caps.push((&t * q.speed(i)).to_integer());
    }
    let cap_mass: BigInt = caps.iter().sum();
    let second_mass = (BigInt::one() << q.machines) - 1;
    let digits_ok = cs.bin_sizes.iter().enumerate().all(|(i, s)| {
        let third = s - &k1 - (BigInt::one() << i) * &k2;
        third == caps[i] && third < k2
    });
    let ok = cap_mass < k2 && &second_mass * &k2 + &cap_mass < k1 && digits_ok;
    Check::with_detail(
        "carry",
        ok,
        format!("K1={k1} K2={k2} third={cap_mass} second={second_mass}"),
    )
}

fn roundtrip_q2cs(q: &ScheduleInstance, opts: &SolverOptions) -> SweepRecord {
    let d = digest(&Document::Schedule(q.clone()));
    let tag = Family::Q2Cs.tag().to_string();
    let t = q.target.clone().expect("toy instances carry a target");
    let src = match brute_force_solve_with(q, opts) {
        Ok((_, v)) => v <= t,
        Err(SolveError::NoFeasibleAssignment) => false,
        Err(e @ SolveError::BudgetExceeded { .. }) => return SweepRecord::skipped(d, tag, None, e.to_string()),
        Err(e) => {
            return SweepRecord::from_checks(
                d,
                tag,
                None,
                None,
                vec![Check::with_detail("solve", false, e.to_string())],
            )
        }
    };
    let mut checks = vec![carry_check(q, None)];
    let (cs, _) = match q_to_cutting_stock(q, None) {
        Ok(x) => x,
        Err(e) => {
            checks.push(Check::with_detail("reduce", false, e.to_string()));
            return SweepRecord::from_checks(d, tag, Some(src), None, checks);
        }
    };
    let budget = cs.budget.clone().expect("reduction sets a budget");
    let meets = match cuttingstock_solve_with(&cs, opts) {
        Ok(sol) => {
            checks.push(Check::new("valid", sol.is_valid_for(&cs)));
            match cuttingstock_brute_force(&cs, opts) {
                Ok(c) => checks.push(Check::with_detail(
                    "brute_cost",
                    c == sol.cost,
                    format!("dp {} brute {c}", sol.cost),
                )),
                Err(SolveError::BudgetExceeded { .. }) => {}
                Err(e) => checks.push(Check::with_detail("brute_cost", false, e.to_string())),
            }
            let meets = sol.cost <= budget;
            if meets {
                checks.push(Check::with_detail(
                    "once",
                    sol.purchases.iter().all(|&p| p == 1),
                    format!("purchases {:?}", sol.purchases),
                ));
            }
            meets
        }
        Err(SolveError::Infeasible { .. }) => false,
        Err(e @ SolveError::BudgetExceeded { .. }) => return SweepRecord::skipped(d, tag, Some(src), e.to_string()),
        Err(e) => {
            checks.push(Check::with_detail("solve", false, e.to_string()));
            return SweepRecord::from_checks(d, tag, Some(src), None, checks);
        }
    };
    checks.push(Check::with_detail(
        "equivalence",
        src == meets,
        format!("source {src}, within budget {meets}"),
    ));
    SweepRecord::from_checks(d, tag, Some(src), Some(meets), checks)
}

// ---------------------------------------------------------------------------
// Forward targets

/// Builds the perfect schedule of a planted packing and compares its exact
/// objective value with the certificate target.
pub fn target_value_check(spec: &SweepSpec) -> Result<SweepReport, SweepError> {
    spec.validate()?;
    let family = match spec.family {
        Some(f) if f.is_schedule_family() => f,
        _ => {
            return Err(SweepError::Unsupported {
                sweep: "target",
                family: spec.family_tag(),
            })
        }
    };
    let sources = planted_sources(spec)?;
    let records = run(spec, &sources, |p| target_instance(family, p));
    Ok(SweepReport::new("target", family.tag().to_string(), records))
}

pub fn target_instance(family: Family, planted: &Planted) -> SweepRecord {
    let bins = planted.packing.iter().max().map_or(1, |&j| j + 1);
    let bbp = BalancedBinPackingInstance::new(planted.items.clone(), bins, planted.capacity)
        .expect("planted instances are balanced");
    let d = digest(&Document::BalancedBinPacking(bbp.clone()));
    let tag = family.tag().to_string();
    let fail = |name, e: String| {
        SweepRecord::from_checks(
            d.clone(),
            tag.clone(),
            Some(true),
            None,
            vec![Check::with_detail(name, false, e)],
        )
    };
    let (inst, cert) = match reduce_bbp(family, &bbp) {
        Ok(x) => x,
        Err(e) => return fail("reduce", e.to_string()),
    };
    let x = match perfect_schedule(&cert, &planted.packing) {
        Ok(x) => x,
        Err(e) => return fail("perfect", e.to_string()),
    };
    let value = match eval_objective(&inst, &x) {
        Ok(v) => v,
        Err(e) => return fail("eval", e.to_string()),
    };
    let mut checks = vec![
        Check::with_detail(
            "target",
            value == cert.target,
            format!("value {value}, target {}", cert.target),
        ),
        Check::new(
            "perfect_roundtrip",
            packing_from_perfect_schedule(&cert, &x).is_ok_and(|m| bbp.is_valid_packing(&m)),
        ),
    ];
    checks.push(load_identity(&inst, &cert, &x));
    if cert.rank2.is_some() {
        checks.push(Check::new("rank2", rank2_matches(&inst, &cert)));
    }
    if family == Family::Bbp2QL2 {
        checks.push(speed_root_check(&inst, &cert));
        checks.push(Check::new("speed_bound", l2_speed_bound_holds(&inst, &cert)));
    }
    if family == Family::Bbp2RSumWc {
        checks.extend(sumwc_checks(&inst, &cert, &x));
    }
    let ok = checks.iter().all(|c| c.ok);
    SweepRecord::from_checks(d, tag, Some(true), Some(ok), checks)
}

/// Unscaled perfect loads: `T + a_i` in the uniform families, `T_R` on every
/// machine in the γ families, at most the horizon in the four-type family.
fn load_identity(inst: &ScheduleInstance, cert: &ReductionCertificate, x: &Assignment) -> Check {
    let lv = match loads(inst, x) {
        Ok(l) => l.unscaled,
        Err(e) => return Check::with_detail("loads", false, e.to_string()),
    };
    let bad = lv.iter().enumerate().find(|&(i, l)| {
        let expect = match cert.family {
            Family::Bbp2QCmax | Family::Bbp2QL2 => &cert.horizon + BigInt::from(cert.items[i]),
            _ => cert.horizon.clone(),
        };
        if cert.family == Family::Bbp2RCmax4 {
            *l > expect
        } else {
            *l != expect
        }
    });
    match bad {
        None => Check::new("loads", true),
        Some((i, l)) => Check::with_detail("loads", false, format!("machine {} load {l}", i + 1)),
    }
}

/// `s_i` is the least integer with `s_i² ≥ (T + a_max)²·(T + a_i)`.
fn speed_root_check(inst: &ScheduleInstance, cert: &ReductionCertificate) -> Check {
    let top = &cert.horizon + BigInt::from(cert.a_max);
    for (i, &ai) in cert.items.iter().enumerate() {
        let s = inst.speed(i);
        let rhs = &top * &top * (&cert.horizon + BigInt::from(ai));
        let ok = s.is_integer() && {
            let si = s.to_integer();
            let below = &si - 1;
            &si * &si >= rhs
                && (si <= BigInt::one() || &below * &below < rhs)
                && si == l2_speed(&top, &(&cert.horizon + ai))
        };
        if !ok {
            return Check::with_detail("speed_root", false, format!("machine {} speed {s}", i + 1));
        }
    }
    Check::new("speed_root", true)
}

fn sumwc_checks(inst: &ScheduleInstance, cert: &ReductionCertificate, x: &Assignment) -> Vec<Check> {
    let mut out = Vec::new();
    match (eval_sumwc_sim(inst, x), eval_sumwc_closed(inst, x)) {
        (Ok(sim), Ok(closed)) => {
            out.push(Check::with_detail(
                "sumwc_identity",
                sim == closed.total && closed.total == cert.target,
                format!("sim {sim}, closed {}, target {}", closed.total, cert.target),
            ));
            out.push(Check::new("breakdown", closed.parts_sum() == closed.total));
        }
        (a, b) => out.push(Check::with_detail("sumwc_identity", false, format!("{a:?} {b:?}"))),
    }
    out.push(Check::new(
        "sumwc_terms",
        cert.sumwc.as_ref().is_some_and(|t| t.total() == cert.target),
    ));
    // Γ recomputed from multiplicities: ½ Σ n_t p_t w_t over the machine-independent types.
    let g = cert.role_index(JobRole::Gamma);
    let mut gamma = BigRational::from_integer(BigInt::from(0));
    for (t, job) in inst.jobs.iter().enumerate() {
        if Some(t) == g {
            continue;
        }
        let p = inst.size(0, t).cloned().unwrap_or_default();
        let w = job.weight.clone().unwrap_or_default();
        gamma += BigRational::new(&job.multiplicity * p * w, BigInt::from(2));
    }
    // The breakdown files γ under the uniform part when every a_i is equal.
    let mut expect_uniform = gamma.clone();
    if let (Some(g), Some(t)) = (g, &cert.sumwc) {
        if inst.machine_independent(g) {
            expect_uniform += &t.delta_linear;
        }
    }
    let closed_uniform = eval_sumwc_closed(inst, x).map(|b| b.uniform_linear);
    out.push(Check::with_detail(
        "gamma_term",
        cert.sumwc.as_ref().is_some_and(|t| t.gamma == gamma) && closed_uniform.as_ref() == Ok(&expect_uniform),
        format!("recomputed {gamma}"),
    ));
    out.push(gamma_first(inst, cert, x));
    out
}

/// On every machine the γ job has strictly the largest Smith ratio among the
/// job types that machine runs.
fn gamma_first(inst: &ScheduleInstance, cert: &ReductionCertificate, x: &Assignment) -> Check {
    let Some(g) = cert.role_index(JobRole::Gamma) else {
        return Check::with_detail("gamma_first", false, "no gamma type");
    };
    let wg = inst.jobs[g].weight.clone().unwrap_or_default();
    for (i, row) in x.counts.iter().enumerate() {
        let pg = inst.size(i, g).cloned().unwrap_or_default();
        for (t, &c) in row.iter().enumerate() {
            if t == g || c == 0 {
                continue;
            }
            let wt = inst.jobs[t].weight.clone().unwrap_or_default();
            let pt = inst.size(i, t).cloned().unwrap_or_default();
            // w_γ/p_γ > w_t/p_t
            if &wg * &pt <= &wt * &pg {
                return Check::with_detail("gamma_first", false, format!("machine {} type {}", i + 1, t + 1));
            }
        }
    }
    Check::new("gamma_first", true)
}

// ---------------------------------------------------------------------------
// Solver oracle

const MODELS: [MachineModel; 3] = [MachineModel::Identical, MachineModel::Uniform, MachineModel::Unrelated];
const OBJECTIVES: [Objective; 3] = [Objective::Cmax, Objective::L2Sq, Objective::SumWc];

/// The solver sweep's instances in grid order.
pub fn oracle_instances(spec: &SweepSpec) -> Result<Vec<ScheduleInstance>, SweepError> {
    let Generator::Grid {
        max_machines,
        max_types,
        max_total,
        max_size,
        max_weight,
        seed,
        sample,
    } = &spec.generator
    else {
        return Err(SweepError::Invalid("the solver sweep needs a grid generator".into()));
    };
    let mut rng = generate::rng(*seed);
    let mut out = Vec::new();
    match sample {
        None => {
            for model in MODELS {
                for objective in OBJECTIVES {
                    for m in 1..=*max_machines {
                        for k in 1..=*max_types {
                            for counts in generate::multiplicity_vectors(k, *max_total) {
                                out.push(generate::random_schedule(
                                    &mut rng,
                                    model,
                                    objective,
                                    m,
                                    &counts,
                                    *max_size,
                                    *max_weight,
                                ));
                            }
                        }
                    }
                }
            }
        }
        Some(trials) => {
            use rand::Rng;
            for _ in 0..*trials {
                let model = MODELS[rng.gen_range(0..3)];
                let objective = OBJECTIVES[rng.gen_range(0..3)];
                let m = rng.gen_range(1..=*max_machines);
                let k = rng.gen_range(1..=*max_types);
                let mut left = *max_total;
                let counts: Vec<u64> = (0..k)
                    .map(|_| {
                        let c = rng.gen_range(0..=left);
                        left -= c;
                        c
                    })
                    .collect();
                out.push(generate::random_schedule(
                    &mut rng,
                    model,
                    objective,
                    m,
                    &counts,
                    *max_size,
                    *max_weight,
                ));
            }
        }
    }
    Ok(out)
}

/// The configuration DP and the brute-force enumerator agree on the optimum
/// of every grid instance.
pub fn oracle_equivalence_sweep(spec: &SweepSpec) -> Result<SweepReport, SweepError> {
    spec.validate()?;
    if spec.family.is_some() {
        return Err(SweepError::Unsupported {
            sweep: "oracle",
            family: spec.family_tag(),
        });
    }
    let instances = oracle_instances(spec)?;
    let records = run(spec, &instances, |inst| oracle_instance(inst, &spec.budget));
    Ok(SweepReport::new("oracle", "solver".into(), records))
}

pub fn oracle_instance(inst: &ScheduleInstance, opts: &SolverOptions) -> SweepRecord {
    let d = digest(&Document::Schedule(inst.clone()));
    let tag = "solver".to_string();
    let brute = brute_force_solve_with(inst, opts);
    let dp = dp_minimize_with(inst, opts);
    let skip = |e: &SolveError| matches!(e, SolveError::BudgetExceeded { .. });
    match (&brute, &dp) {
        (Err(e), _) | (_, Err(e)) if skip(e) => return SweepRecord::skipped(d, tag, None, e.to_string()),
        _ => {}
    }
    let mut checks = Vec::new();
    match (brute, dp) {
        (Ok((_, bv)), Ok((a, dv))) => {
            checks.push(Check::with_detail("value", bv == dv, format!("brute {bv}, dp {dv}")));
            checks.push(Check::new(
                "dp_assignment",
                eval_objective(inst, &a).is_ok_and(|v| v == dv),
            ));
            if inst.objective == Objective::Cmax {
                checks.push(monotone_check(inst, &dv, opts));
            }
        }
        (Err(a), Err(b)) => checks.push(Check::with_detail("value", a == b, format!("brute {a}, dp {b}"))),
        (a, b) => checks.push(Check::with_detail(
            "value",
            false,
            format!("brute {:?}, dp {:?}", a.map(|x| x.1), b.map(|x| x.1)),
        )),
    }
    let feasible = checks.first().map(|_| true);
    SweepRecord::from_checks(d, tag, feasible, feasible, checks)
}

/// Feasible at the optimum and at the optimum plus one.
fn monotone_check(inst: &ScheduleInstance, opt: &BigRational, opts: &SolverOptions) -> Check {
    let at = |t: &BigRational| matches!(dp_feasible_cmax_with(inst, t, opts), Ok(Some(_)));
    let next = opt + BigRational::one();
    Check::new("monotone", at(opt) && at(&next))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exhaustive(family: Family, bins: usize, items: usize, size: u64) -> SweepSpec {
        let mut s = SweepSpec::new(
            Some(family),
            Generator::Exhaustive {
                bins: vec![bins],
                min_items: items,
                max_items: items,
                max_size: size,
            },
        );
        s.timing = false;
        s
    }

    fn randomized(family: Family, trials: usize, seed: u64) -> SweepSpec {
        let mut s = SweepSpec::new(
            Some(family),
            Generator::Randomized {
                trials,
                seed,
                bins: 2,
                items: 4,
                max_size: 4,
            },
        );
        s.timing = false;
        s
    }

    #[test]
    fn qcmax_small_sweep_covers_both_canonical_instances() {
        let rep = roundtrip_check(&exhaustive(Family::Bbp2QCmax, 2, 4, 3)).unwrap();
        assert!(rep.passed(), "{:?}", rep.counterexamples());
        let b0 = digest(&Document::BalancedBinPacking(
            BalancedBinPackingInstance::new(vec![1, 1, 2, 2], 2, 3).unwrap(),
        ));
        let b1 = digest(&Document::BalancedBinPacking(
            BalancedBinPackingInstance::new(vec![1, 1, 1, 3], 2, 3).unwrap(),
        ));
        let r0 = rep.records.iter().find(|r| r.digest == b0).unwrap();
        let r1 = rep.records.iter().find(|r| r.digest == b1).unwrap();
        assert_eq!((r0.source_feasible, r0.reduced_feasible), (Some(true), Some(true)));
        assert_eq!((r1.source_feasible, r1.reduced_feasible), (Some(false), Some(false)));
    }

    #[test]
    fn bp2bbp_small_sweep() {
        let mut spec = exhaustive(Family::Bp2Bbp, 2, 1, 4);
        spec.generator = Generator::Exhaustive {
            bins: vec![2, 3],
            min_items: 1,
            max_items: 4,
            max_size: 3,
        };
        spec.tight_only = false;
        let rep = roundtrip_check(&spec).unwrap();
        assert!(rep.passed());
        assert!(rep.records.iter().any(|r| r.source_feasible == Some(false)));
    }

    #[test]
    fn empty_sweep_passes() {
        let rep = roundtrip_check(&randomized(Family::Bbp2RCmax, 0, 1)).unwrap();
        assert!(rep.passed() && rep.records.is_empty());
        let rep = target_value_check(&randomized(Family::Bbp2QL2, 0, 1)).unwrap();
        assert!(rep.passed() && rep.records.is_empty());
    }

    #[test]
    fn q2cs_toy_sweep() {
        let mut spec = exhaustive(Family::Q2Cs, 2, 1, 2);
        spec.generator = Generator::Exhaustive {
            bins: vec![2],
            min_items: 1,
            max_items: 3,
            max_size: 3,
        };
        let rep = roundtrip_check(&spec).unwrap();
        assert!(rep.passed(), "{:?}", rep.counterexamples());
        assert!(rep.records.iter().any(|r| r.reduced_feasible == Some(true)));
        assert!(rep.records.iter().any(|r| r.reduced_feasible == Some(false)));
    }

    #[test]
    fn target_sweeps_pass_and_repeat() {
        for f in [Family::Bbp2QL2, Family::Bbp2RL2, Family::Bbp2RSumWc, Family::Bbp2QCmax] {
            let a = target_value_check(&randomized(f, 3, 7)).unwrap();
            assert!(a.passed(), "{f}: {:?}", a.counterexamples());
            assert_eq!(a.records.len(), 3);
            let b = target_value_check(&randomized(f, 3, 7)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn unsupported_families_are_rejected() {
        assert!(matches!(
            roundtrip_check(&randomized(Family::Bbp2QL2, 1, 1)),
            Err(SweepError::Unsupported { .. })
        ));
        assert!(matches!(
            target_value_check(&randomized(Family::Q2Cs, 1, 1)),
            Err(SweepError::Unsupported { .. })
        ));
        let mut s = randomized(Family::Bbp2QCmax, 1, 1);
        s.generator = Generator::Randomized {
            trials: 1,
            seed: 1,
            bins: 3,
            items: 4,
            max_size: 3,
        };
        assert!(matches!(roundtrip_check(&s), Err(SweepError::Invalid(_))));
    }

    #[test]
    fn small_oracle_grid() {
        let mut spec = SweepSpec::new(
            None,
            Generator::Grid {
                max_machines: 2,
                max_types: 2,
                max_total: 3,
                max_size: 4,
                max_weight: 3,
                seed: 5,
                sample: None,
            },
        );
        spec.timing = false;
        let rep = oracle_equivalence_sweep(&spec).unwrap();
        assert!(rep.passed(), "{:?}", rep.counterexamples());
        // 3 models × 3 objectives × 2 machine counts × (4 + 10) multiplicity vectors
        assert_eq!(rep.records.len(), 3 * 3 * 2 * 14);
        assert!(rep.records.iter().any(|r| r.check("monotone").is_some()));
    }
}
