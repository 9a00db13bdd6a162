use hmsched_core::arith::{int, ratio};
use hmsched_core::eval::{eval_l2sq, eval_objective, eval_sumwc_closed, eval_sumwc_sim, loads};
use hmsched_core::format::{digest, parse_document, to_canonical_string, to_pretty_string, Document};
use hmsched_core::model::{Assignment, JobSizes, MachineModel, Objective, ScheduleInstance};
use hmsched_core::nfold::{build_nfold_cmax, build_nfold_objective, parse_text, to_text};
use hmsched_core::reductions::{
    bbp_to_q_cmax, bbp_to_q_l2, packing_from_perfect_schedule, BalancedBinPackingInstance, CuttingStockInstance,
};
use hmsched_core::solvers::{
    brute_force_solve, cuttingstock_brute_force, cuttingstock_solve, dp_feasible_cmax, dp_minimize, SolveError,
    SolverOptions,
};
use hmsched_core::verify::generate::{random_schedule, rng};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

const MODELS: [MachineModel; 3] = [MachineModel::Identical, MachineModel::Uniform, MachineModel::Unrelated];

fn instance(seed: u64, model: usize, objective: Objective, m: usize, counts: &[u64]) -> ScheduleInstance {
    random_schedule(&mut rng(seed), MODELS[model], objective, m, counts, 6, 5)
}

/// Each job goes to a uniformly chosen machine where its size is finite.
fn random_assignment(seed: u64, inst: &ScheduleInstance) -> Option<Assignment> {
    let mut r = rng(seed ^ 0x9e37_79b9);
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

/// Same instance with machine `i` moved to position `perm[i]`.
fn permute_machines(inst: &ScheduleInstance, a: &Assignment, perm: &[usize]) -> (ScheduleInstance, Assignment) {
    let mut p = inst.clone();
    let mut counts = a.counts.clone();
    for (i, &to) in perm.iter().enumerate() {
        counts[to] = a.counts[i].clone();
    }
    if inst.speeds.len() == perm.len() {
        for (i, &to) in perm.iter().enumerate() {
            p.speeds[to] = inst.speeds[i].clone();
        }
    }
    for (job, orig) in p.jobs.iter_mut().zip(&inst.jobs) {
        if let JobSizes::PerMachine(v) = &orig.sizes {
            let mut w = v.clone();
            for (i, &to) in perm.iter().enumerate() {
                w[to] = v[i].clone();
            }
            job.sizes = JobSizes::PerMachine(w);
        }
    }
    (p, Assignment::new(counts))
}

fn counts_strategy(max_k: usize, max_total: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0..=max_total, 1..=max_k).prop_map(move |mut v| {
        // Trim to the total bound.
        let mut left = max_total;
        for c in v.iter_mut() {
            *c = (*c).min(left);
            left -= *c;
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sumwc_closed_form_matches_simulation(
        seed in any::<u64>(), model in 0..3usize, m in 1..=4usize, counts in counts_strategy(4, 10),
    ) {
        let inst = instance(seed, model, Objective::SumWc, m, &counts);
        if let Some(a) = random_assignment(seed, &inst) {
            let sim = eval_sumwc_sim(&inst, &a).unwrap();
            let closed = eval_sumwc_closed(&inst, &a).unwrap();
            prop_assert_eq!(&closed.total, &sim);
            prop_assert_eq!(closed.parts_sum(), sim);
            prop_assert!(closed.load_term >= BigRational::zero());
        }
    }

    #[test]
    fn dp_matches_brute_force(
        seed in any::<u64>(), model in 0..3usize, objective in 0..3usize, m in 1..=3usize,
        counts in counts_strategy(3, 5),
    ) {
        let inst = instance(seed, model, Objective::ALL[objective], m, &counts);
        match (dp_minimize(&inst), brute_force_solve(&inst)) {
            (Ok((a, v)), Ok((_, w))) => {
                prop_assert_eq!(&v, &w);
                prop_assert_eq!(eval_objective(&inst, &a).unwrap(), v);
            }
            (Err(e), Err(f)) => prop_assert_eq!(e, f),
            (x, y) => prop_assert!(false, "dp {:?} vs brute {:?}", x.map(|r| r.1), y.map(|r| r.1)),
        }
    }

    #[test]
    fn cmax_decision_is_monotone(
        seed in any::<u64>(), model in 0..3usize, m in 1..=3usize, counts in counts_strategy(3, 5), t in 0..30i64,
    ) {
        let inst = instance(seed, model, Objective::Cmax, m, &counts);
        let at = |t: i64| dp_feasible_cmax(&inst, &ratio(t, 1)).unwrap().is_some();
        if at(t) {
            prop_assert!(at(t + 1));
        }
    }

    #[test]
    fn l2sq_lies_between_its_bounds(seed in any::<u64>(), m in 1..=4usize, counts in counts_strategy(4, 10)) {
        // Identical machines: (Σ load)²/m ≤ Σ load² ≤ (Σ load)².
        let inst = instance(seed, 0, Objective::L2Sq, m, &counts);
        let a = random_assignment(seed, &inst).unwrap();
        let total: BigInt = loads(&inst, &a).unwrap().unscaled.iter().sum();
        let total = BigRational::from_integer(total);
        let v = eval_l2sq(&inst, &a).unwrap();
        prop_assert!(&total * &total / BigRational::from_integer(BigInt::from(m)) <= v);
        prop_assert!(v <= &total * &total);
    }

    #[test]
    fn objectives_ignore_machine_order(
        seed in any::<u64>(), model in 0..3usize, objective in 0..3usize, m in 1..=4usize,
        counts in counts_strategy(3, 8), shift in 0..4usize,
    ) {
        let inst = instance(seed, model, Objective::ALL[objective], m, &counts);
        if let Some(a) = random_assignment(seed, &inst) {
            let perm: Vec<usize> = (0..m).map(|i| (i + shift) % m).collect();
            let (pi, pa) = permute_machines(&inst, &a, &perm);
            prop_assert_eq!(eval_objective(&inst, &a).unwrap(), eval_objective(&pi, &pa).unwrap());
        }
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>(), model in 0..3usize, objective in 0..3usize, m in 1..=4usize,
        counts in counts_strategy(4, 9)) {
        let inst = instance(seed, model, Objective::ALL[objective], m, &counts).with_target(ratio(7, 3));
        let doc = Document::Schedule(inst);
        prop_assert_eq!(&parse_document(&to_pretty_string(&doc)).unwrap(), &doc);
        let back = parse_document(&to_canonical_string(&doc)).unwrap();
        prop_assert_eq!(digest(&back), digest(&doc));
        if let Some(a) = random_assignment(seed, match &doc { Document::Schedule(s) => s, _ => unreachable!() }) {
            let d = Document::Assignment(a);
            prop_assert_eq!(parse_document(&to_canonical_string(&d)).unwrap(), d);
        }
    }

    #[test]
    fn nfold_text_round_trips(seed in any::<u64>(), model in 0..3usize, objective in 0..3usize, m in 1..=3usize,
        counts in counts_strategy(3, 6)) {
        let inst = instance(seed, model, Objective::ALL[objective], m, &counts);
        let built = match inst.objective {
            Objective::Cmax => build_nfold_cmax(&inst, &ratio(9, 2)),
            _ => build_nfold_objective(&inst),
        };
        if let Ok(model) = built {
            let text = to_text(&model);
            let back = parse_text(&text).unwrap();
            prop_assert_eq!(&back, &model);
            prop_assert_eq!(to_text(&back), text);
        }
    }

    #[test]
    fn dp_solutions_satisfy_the_nfold_model(seed in any::<u64>(), model in 0..3usize, m in 1..=3usize,
        counts in counts_strategy(3, 5)) {
        let inst = instance(seed, model, Objective::Cmax, m, &counts);
        if let Ok((a, v)) = dp_minimize(&inst) {
            let nf = build_nfold_cmax(&inst, &v).unwrap();
            let report = nf.check_solution(&nf.solution_vector(&inst, &a)).unwrap();
            prop_assert!(report.ok, "{:?}", report.violations);
        }
    }

    #[test]
    fn cutting_stock_invariances(
        items in prop::collection::vec((1..=6i64, 1..=3u64), 1..=3),
        bins in prop::collection::vec((3..=8i64, 1..=6i64), 1..=2),
        rot in 0..3usize,
    ) {
        let make = |items: &[(i64, u64)], bins: &[(i64, i64)]| {
            CuttingStockInstance::new(
                items.iter().map(|&(s, _)| int(s)).collect(),
                items.iter().map(|&(_, n)| n).collect(),
                bins.iter().map(|&(s, _)| int(s)).collect(),
                bins.iter().map(|&(_, c)| int(c)).collect(),
            ).unwrap()
        };
        let base = make(&items, &bins);
        let cost = cuttingstock_solve(&base).map(|s| s.cost);
        prop_assert_eq!(&cost, &cuttingstock_brute_force(&base, &SolverOptions::default()));

        let mut rotated = items.clone();
        let len = rotated.len();
        rotated.rotate_left(rot % len);
        prop_assert_eq!(cuttingstock_solve(&make(&rotated, &bins)).map(|s| s.cost).ok(), cost.clone().ok());

        // Splitting a type into two identical types changes nothing.
        let mut split = items.clone();
        if split[0].1 >= 2 {
            let (s, n) = split[0];
            split[0] = (s, 1);
            split.push((s, n - 1));
            let sol = cuttingstock_solve(&make(&split, &bins));
            prop_assert_eq!(sol.clone().map(|s| s.cost).ok(), cost.clone().ok());
            if let Ok(sol) = sol {
                prop_assert!(sol.is_valid_for(&make(&split, &bins)));
            }
        }
        if let Err(e) = &cost {
            let infeasible = matches!(e, SolveError::Infeasible { .. });
            prop_assert!(infeasible);
        }
    }
}

/// Least `s` with `s² ≥ n`, by floating point estimate and exact correction.
fn ceil_sqrt_u128(n: u128) -> u128 {
    let mut s = (n as f64).sqrt() as u128;
    while s * s < n {
        s += 1;
    }
    while s > 0 && (s - 1) * (s - 1) >= n {
        s -= 1;
    }
    s
}

#[test]
fn l2_speeds_of_the_canonical_instance() {
    let bbp = BalancedBinPackingInstance::new(vec![1, 1, 2, 2], 2, 3).unwrap();
    let (inst, cert) = bbp_to_q_l2(&bbp).unwrap();
    let t: u128 = 1296;
    for (i, &a) in [1u128, 1, 2, 2].iter().enumerate() {
        let n = (t + 2) * (t + 2) * (t + a);
        let s = ceil_sqrt_u128(n);
        assert_eq!(inst.speed(i), BigRational::from_integer(BigInt::from(s)));
    }
    assert_eq!(inst.speed(0), ratio(46747, 1));
    assert_eq!(inst.speed(2), ratio(46765, 1));
    let expect: BigRational = [(1297, 46747), (1297, 46747), (1298, 46765), (1298, 46765)]
        .iter()
        .map(|&(l, s)| {
            let x = ratio(l, s);
            &x * &x
        })
        .sum();
    assert_eq!(cert.target, expect);
    assert!(cert.target < BigRational::from_integer(BigInt::from(4)) * BigRational::one());
}

#[test]
fn dp_finds_a_perfect_schedule_for_the_canonical_instance() {
    let bbp = BalancedBinPackingInstance::new(vec![1, 1, 2, 2], 2, 3).unwrap();
    let (q, cert) = bbp_to_q_cmax(&bbp).unwrap();
    let a = dp_feasible_cmax(&q, &ratio(1296, 1))
        .unwrap()
        .expect("BBP₀ is feasible");
    let map = packing_from_perfect_schedule(&cert, &a).unwrap();
    assert!(bbp.is_valid_packing(&map));
    let nf = build_nfold_cmax(&q, &ratio(1296, 1)).unwrap();
    assert!(nf.check_solution(&nf.solution_vector(&q, &a)).unwrap().ok);
    assert!(dp_feasible_cmax(&q, &ratio(1295, 1)).unwrap().is_none());
}
