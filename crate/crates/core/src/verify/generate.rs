//! Deterministic instance generators for the sweeps.

use crate::arith::ratio;
use crate::model::{JobType, MachineModel, Objective, ScheduleInstance, Size};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every sequence of `len` sizes in `1..=max_size`, in lexicographic order.
pub fn all_sequences(len: usize, max_size: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![1u64; len];
    loop {
        out.push(cur.clone());
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < max_size {
                cur[i] += 1;
                break;
            }
            cur[i] = 1;
        }
    }
}

/// A tight balanced instance with a known packing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Planted {
    pub items: Vec<u64>,
    pub capacity: u64,
    /// Bin of each item.
    pub packing: Vec<usize>,
}

/// Draws `per_bin` sizes summing to `B` for every bin, then shuffles the
/// items (and their bin labels) together.
pub fn planted_balanced(rng: &mut ChaCha8Rng, bins: usize, per_bin: usize, max_size: u64) -> Planted {
    let lo = per_bin as u64;
    let hi = per_bin as u64 * max_size;
    let capacity = rng.gen_range(lo..=hi);
    let mut pairs = Vec::with_capacity(bins * per_bin);
    for j in 0..bins {
        pairs.extend(
            bounded_composition(rng, capacity, per_bin, max_size)
                .into_iter()
                .map(|a| (a, j)),
        );
    }
    pairs.shuffle(rng);
    let (items, packing) = pairs.into_iter().unzip();
    Planted {
        items,
        capacity,
        packing,
    }
}

/// Uniform composition of `total` into `parts` values in `1..=max`, by
/// rejection over stars-and-bars cut points.
fn bounded_composition(rng: &mut ChaCha8Rng, total: u64, parts: usize, max: u64) -> Vec<u64> {
    assert!(parts as u64 <= total && total <= parts as u64 * max);
    loop {
        let mut cuts: Vec<u64> = rand::seq::index::sample(rng, (total - 1) as usize, parts - 1)
            .into_iter()
            .map(|c| c as u64 + 1)
            .collect();
        cuts.sort_unstable();
        let mut prev = 0;
        let mut out = Vec::with_capacity(parts);
        for c in cuts.into_iter().chain(std::iter::once(total)) {
            out.push(c - prev);
            prev = c;
        }
        if out.iter().all(|&x| x <= max) {
            return out;
        }
    }
}

/// Random sizes in `1..=max_size`, resampled until the total is divisible
/// by `bins` (so the instance is tight for `B = Σ/k`). Feasibility is left
/// to chance.
pub fn random_tight(rng: &mut ChaCha8Rng, bins: usize, items: usize, max_size: u64) -> (Vec<u64>, u64) {
    loop {
        let v: Vec<u64> = (0..items).map(|_| rng.gen_range(1..=max_size)).collect();
        let sum: u64 = v.iter().sum();
        if sum.is_multiple_of(bins as u64) && v.iter().all(|&a| a <= sum / bins as u64) {
            return (v, sum / bins as u64);
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const SPEEDS: [(i64, i64); 3] = [(1, 1), (3, 2), (2, 1)];

/// Every multiplicity vector of length `k` with total at most `max_total`.
pub fn multiplicity_vectors(k: usize, max_total: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; k];
    fn rec(j: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if j == cur.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..=left {
            cur[j] = c;
            rec(j + 1, left - c, cur, out);
        }
        cur[j] = 0;
    }
    rec(0, max_total, &mut cur, &mut out);
    out
}

/// A scheduling instance with the given shape and multiplicities; sizes,
/// weights and speeds come from `rng`. Unrelated instances occasionally
/// mark a size infinite.
pub fn random_schedule(
    rng: &mut ChaCha8Rng,
    model: MachineModel,
    objective: Objective,
    machines: usize,
    counts: &[u64],
    max_size: u64,
    max_weight: u64,
) -> ScheduleInstance {
    let jobs: Vec<JobType> = counts
        .iter()
        .map(|&n| {
            let job = match model {
                MachineModel::Unrelated => JobType::per_machine(
                    (0..machines)
                        .map(|_| {
                            if machines > 1 && rng.gen_ratio(1, 8) {
                                Size::Infinite
                            } else {
                                Size::Finite(rng.gen_range(1..=max_size).into())
                            }
                        })
                        .collect(),
                    n,
                ),
                _ => JobType::new(rng.gen_range(1..=max_size), n),
            };
            job.with_weight(rng.gen_range(0..=max_weight))
        })
        .collect();
    let inst = match model {
        MachineModel::Identical => ScheduleInstance::identical(machines, jobs),
        MachineModel::Uniform => ScheduleInstance::uniform(
            (0..machines)
                .map(|_| {
                    let (p, q) = SPEEDS[rng.gen_range(0..SPEEDS.len())];
                    ratio(p, q)
                })
                .collect(),
            jobs,
        ),
        MachineModel::Unrelated => ScheduleInstance::unrelated(machines, jobs),
    };
    inst.with_objective(objective)
}

/// Two-machine uniform instance with capacities `T·s_i` integral.
pub fn toy_uniform(speeds: [(i64, i64); 2], jobs: &[(u64, u64)], horizon: i64) -> ScheduleInstance {
    ScheduleInstance::uniform(
        speeds.iter().map(|&(p, q)| ratio(p, q)).collect(),
        jobs.iter().map(|&(p, n)| JobType::new(p, n)).collect(),
    )
    .with_target(ratio(horizon, 1))
}

pub fn speed_pairs() -> Vec<[(i64, i64); 2]> {
    SPEEDS
        .iter()
        .flat_map(|&a| SPEEDS.iter().map(move |&b| [a, b]))
        .collect()
}

pub fn random_speed_pair(rng: &mut ChaCha8Rng) -> [(i64, i64); 2] {
    [SPEEDS[rng.gen_range(0..3)], SPEEDS[rng.gen_range(0..3)]]
}
