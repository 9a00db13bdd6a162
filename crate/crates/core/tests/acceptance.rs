//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use hmsched_core::eval::{eval_sumwc_closed, eval_sumwc_sim};
use hmsched_core::model::{Assignment, MachineModel, Objective, ScheduleInstance};
use hmsched_core::reductions::Family;
use hmsched_core::verify::generate::{random_schedule, rng};
use hmsched_core::verify::{
    oracle_equivalence_sweep, roundtrip_check, target_value_check, Generator, SweepReport, SweepSpec, Verdict,
};
use rand::Rng;
use std::process::ExitCode;
use std::time::Instant;

struct Outcome {
    ok: bool,
    detail: String,
}

fn spec(family: Option<Family>, generator: Generator) -> SweepSpec {
    let mut s = SweepSpec::new(family, generator);
    s.timing = false;
    s
}

fn describe(rep: &SweepReport) -> String {
    let s = rep.summary();
    format!(
        "{} {}: {} records, {} failed, {} skipped",
        rep.sweep, rep.family, s.total, s.failed, s.skipped
    )
}

/// Passed with full coverage: no failures and nothing skipped on budget.
fn clean(rep: &SweepReport) -> bool {
    rep.passed() && rep.summary().skipped == 0
}

fn c1_oracle() -> Outcome {
    let rep = oracle_equivalence_sweep(&spec(
        None,
        Generator::Grid {
            max_machines: 3,
            max_types: 3,
            max_total: 6,
            max_size: 5,
            max_weight: 5,
            seed: 2024,
            sample: None,
        },
    ))
    .expect("valid grid");
    let monotone = rep.evaluated("monotone");
    Outcome {
        ok: clean(&rep) && monotone > 0 && rep.failures_of("monotone") == 0,
        detail: format!("{}, {monotone} monotonicity spot checks", describe(&rep)),
    }
}

fn c2_padding() -> Outcome {
    let rep = roundtrip_check(&spec(
        Some(Family::Bp2Bbp),
        Generator::Exhaustive {
            bins: vec![2, 3],
            min_items: 1,
            max_items: 5,
            max_size: 4,
        },
    ))
    .expect("valid sweep");
    let infeasible = rep.records.iter().filter(|r| r.source_feasible == Some(false)).count();
    Outcome {
        ok: clean(&rep),
        detail: format!("{}, {infeasible} infeasible sources", describe(&rep)),
    }
}

const MAKESPAN: [Family; 3] = [Family::Bbp2QCmax, Family::Bbp2RCmax, Family::Bbp2RCmax4];

/// Exhaustive and seeded random round trips for the makespan families.
fn c3_reports() -> Vec<SweepReport> {
    let mut out = Vec::new();
    for f in MAKESPAN {
        out.push(
            roundtrip_check(&spec(
                Some(f),
                Generator::Exhaustive {
                    bins: vec![2],
                    min_items: 4,
                    max_items: 4,
                    max_size: 4,
                },
            ))
            .expect("valid sweep"),
        );
        out.push(
            roundtrip_check(&spec(
                Some(f),
                Generator::Randomized {
                    trials: 50,
                    seed: 3,
                    bins: 2,
                    items: 4,
                    max_size: 8,
                },
            ))
            .expect("valid sweep"),
        );
    }
    out
}

fn c3_roundtrip(reps: &[SweepReport]) -> Outcome {
    let feasible: usize = reps
        .iter()
        .map(|r| r.records.iter().filter(|x| x.reduced_feasible == Some(true)).count())
        .sum();
    let perfect_failures: usize = reps.iter().map(|r| r.failures_of("perfect")).sum();
    let perfect_checked: usize = reps.iter().map(|r| r.evaluated("perfect")).sum();
    Outcome {
        ok: reps.iter().all(clean) && perfect_failures == 0 && perfect_checked == feasible,
        detail: format!(
            "{}; {feasible} feasible reductions, all perfect",
            reps.iter().map(describe).collect::<Vec<_>>().join("; ")
        ),
    }
}

const TARGET: [Family; 6] = [
    Family::Bbp2QCmax,
    Family::Bbp2RCmax,
    Family::Bbp2RCmax4,
    Family::Bbp2QL2,
    Family::Bbp2RL2,
    Family::Bbp2RSumWc,
];

fn c4_reports() -> Vec<SweepReport> {
    let mut out = Vec::new();
    for f in TARGET {
        out.push(
            target_value_check(&spec(
                Some(f),
                Generator::Randomized {
                    trials: 20,
                    seed: 11,
                    bins: 2,
                    items: 4,
                    max_size: 8,
                },
            ))
            .expect("valid sweep"),
        );
        if f != Family::Bbp2RCmax4 {
            out.push(
                target_value_check(&spec(
                    Some(f),
                    Generator::Randomized {
                        trials: 20,
                        seed: 12,
                        bins: 3,
                        items: 6,
                        max_size: 6,
                    },
                ))
                .expect("valid sweep"),
            );
        }
    }
    out
}

fn c4_targets(reps: &[SweepReport]) -> Outcome {
    let required = [
        "target",
        "loads",
        "speed_root",
        "speed_bound",
        "sumwc_identity",
        "gamma_term",
        "gamma_first",
    ];
    let evaluated: Vec<String> = required
        .iter()
        .map(|c| format!("{c}={}", reps.iter().map(|r| r.evaluated(c)).sum::<usize>()))
        .collect();
    let all_present = required
        .iter()
        .all(|c| reps.iter().map(|r| r.evaluated(c)).sum::<usize>() > 0);
    Outcome {
        ok: reps.iter().all(clean) && all_present,
        detail: format!(
            "{} reports, {} instances, {} failed; checks {}",
            reps.len(),
            reps.iter().map(|r| r.records.len()).sum::<usize>(),
            reps.iter().map(|r| r.summary().failed).sum::<usize>(),
            evaluated.join(" ")
        ),
    }
}

/// Distributes each type's jobs over machines where its size is finite.
fn random_assignment(r: &mut impl Rng, inst: &ScheduleInstance) -> Option<Assignment> {
    let mut a = Assignment::zeros(inst.machines, inst.job_types());
    for (j, job) in inst.jobs.iter().enumerate() {
        let allowed: Vec<usize> = (0..inst.machines).filter(|&i| inst.size(i, j).is_some()).collect();
        let n: u64 = job.multiplicity.clone().try_into().ok()?;
        if n > 0 && allowed.is_empty() {
            return None;
        }
        for _ in 0..n {
            a.counts[allowed[r.gen_range(0..allowed.len())]][j] += 1;
        }
    }
    Some(a)
}

fn c5_closed_form() -> Outcome {
    let mut r = rng(5);
    let models = [MachineModel::Identical, MachineModel::Uniform, MachineModel::Unrelated];
    let mut done = 0;
    let mut deviations = 0;
    while done < 200 {
        let m = r.gen_range(1..=4);
        let k = r.gen_range(1..=4);
        let mut left = 10u64;
        let counts: Vec<u64> = (0..k)
            .map(|_| {
                let c = r.gen_range(0..=left);
                left -= c;
                c
            })
            .collect();
        let model = models[r.gen_range(0..3)];
        let inst = random_schedule(&mut r, model, Objective::SumWc, m, &counts, 9, 9);
        let Some(a) = random_assignment(&mut r, &inst) else {
            continue;
        };
        done += 1;
        let sim = eval_sumwc_sim(&inst, &a).expect("complete finite assignment");
        let closed = eval_sumwc_closed(&inst, &a).expect("complete finite assignment");
        if sim != closed.total || closed.parts_sum() != closed.total {
            deviations += 1;
        }
    }
    Outcome {
        ok: deviations == 0,
        detail: format!("{done} assignments, {deviations} deviations"),
    }
}

fn c6_cutting_stock(c3: &[SweepReport]) -> Outcome {
    let q: Vec<&SweepReport> = c3.iter().filter(|r| r.family == Family::Bbp2QCmax.tag()).collect();
    let carry_checked: usize = q.iter().map(|r| r.evaluated("carry")).sum();
    let carry_records: usize = q.iter().map(|r| r.records.len()).sum();
    let carry_failed: usize = q.iter().map(|r| r.failures_of("carry")).sum();

    let toys = [
        roundtrip_check(&spec(
            Some(Family::Q2Cs),
            Generator::Exhaustive {
                bins: vec![2],
                min_items: 1,
                max_items: 4,
                max_size: 4,
            },
        ))
        .expect("valid sweep"),
        roundtrip_check(&spec(
            Some(Family::Q2Cs),
            Generator::Randomized {
                trials: 100,
                seed: 6,
                bins: 2,
                items: 3,
                max_size: 4,
            },
        ))
        .expect("valid sweep"),
    ];
    let once: usize = toys.iter().map(|r| r.evaluated("once")).sum();
    let infeasible: usize = toys
        .iter()
        .map(|r| r.records.iter().filter(|x| x.source_feasible == Some(false)).count())
        .sum();
    Outcome {
        ok: carry_failed == 0 && carry_checked == carry_records && toys.iter().all(clean) && once > 0 && infeasible > 0,
        detail: format!(
            "carry-free on {carry_checked}/{carry_records} Q reductions; {}; {once} budget-meeting solutions, {infeasible} infeasible sources",
            toys.iter().map(describe).collect::<Vec<_>>().join("; ")
        ),
    }
}

fn c7_rank_two(c3: &[SweepReport], c4: &[SweepReport]) -> Outcome {
    let all = c3.iter().chain(c4);
    let r_records: usize = all
        .clone()
        .filter(|r| Family::from_tag(&r.family).is_some_and(|f| f.has_gamma()))
        .map(|r| r.records.iter().filter(|x| x.verdict != Verdict::Skipped).count())
        .sum();
    let checked: usize = all.clone().map(|r| r.evaluated("rank2")).sum();
    let failed: usize = all.map(|r| r.failures_of("rank2")).sum();
    Outcome {
        ok: failed == 0 && checked >= r_records && checked > 0,
        detail: format!("{checked} factorizations checked, {failed} deviations"),
    }
}

fn c8_nfold(c3: &[SweepReport]) -> Outcome {
    let feasible: usize = c3
        .iter()
        .map(|r| r.records.iter().filter(|x| x.reduced_feasible == Some(true)).count())
        .sum();
    let checked: usize = c3.iter().map(|r| r.evaluated("nfold")).sum();
    let failed: usize = c3
        .iter()
        .map(|r| r.failures_of("nfold") + r.failures_of("nfold_text"))
        .sum();
    Outcome {
        ok: failed == 0 && checked == feasible && feasible > 0,
        detail: format!("{checked}/{feasible} DP solutions checked against the exported model, {failed} deviations"),
    }
}

fn report(id: usize, name: &str, start: Instant, o: &Outcome) {
    println!(
        "C{id} {name}: {} ({}; {:.1}s)",
        if o.ok { "PASS" } else { "FAIL" },
        o.detail,
        start.elapsed().as_secs_f64()
    );
}

fn main() -> ExitCode {
    let mut all_ok = true;
    let mut step = |id, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        report(id, name, t, &o);
        all_ok &= o.ok;
    };
    step(1, "oracle equivalence", &mut c1_oracle);
    step(2, "padding equivalence", &mut c2_padding);

    let t = Instant::now();
    let c3 = c3_reports();
    let c3_time = t.elapsed();
    step(3, "makespan round trips", &mut || {
        let o = c3_roundtrip(&c3);
        Outcome {
            detail: format!("{}; sweeps {:.1}s", o.detail, c3_time.as_secs_f64()),
            ..o
        }
    });
    let t = Instant::now();
    let c4 = c4_reports();
    let c4_time = t.elapsed();
    step(4, "forward targets", &mut || {
        let o = c4_targets(&c4);
        Outcome {
            detail: format!("{}; sweeps {:.1}s", o.detail, c4_time.as_secs_f64()),
            ..o
        }
    });
    step(5, "weighted completion closed form", &mut c5_closed_form);
    step(6, "cutting stock structure", &mut || c6_cutting_stock(&c3));
    step(7, "rank-two certificates", &mut || c7_rank_two(&c3, &c4));
    step(8, "n-fold consistency", &mut || c8_nfold(&c3));

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
