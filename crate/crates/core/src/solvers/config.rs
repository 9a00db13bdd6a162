//! Configuration enumeration: job-count vectors that fit one machine.

use crate::arith::floor_rational;
use crate::model::ScheduleInstance;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// All `x` with `0 <= x <= bound` whose scaled load on `machine` is at most
/// `cap`, in lexicographic order (first coordinate most significant).
pub fn enumerate_configurations(
    inst: &ScheduleInstance,
    machine: usize,
    cap: &BigRational,
    bound: &[u64],
) -> Vec<Vec<u64>> {
    let unscaled_cap = floor_rational(&(cap * inst.speed(machine)));
    let sizes: Vec<Option<&BigInt>> = (0..bound.len()).map(|j| inst.size(machine, j)).collect();
    let mut out = Vec::new();
    let spec = Enumeration {
        sizes: &sizes,
        cap: Some(&unscaled_cap),
        bound,
        forced: &vec![false; bound.len()],
        proxy: None,
    };
    spec.for_each(|x, _| out.push(x.to_vec()));
    out
}

/// Lower bound `Σ_j x_j q_j >= threshold` used to discard configurations that
/// leave more work than later machines can absorb.
pub(crate) struct Proxy<'a> {
    pub weights: &'a [Option<BigInt>],
    pub threshold: BigInt,
}

/// Depth-first configuration enumeration with optional capacity, forced
/// coordinates (`x_j == bound_j`) and a proxy lower bound.
pub(crate) struct Enumeration<'a> {
    pub sizes: &'a [Option<&'a BigInt>],
    pub cap: Option<&'a BigInt>,
    pub bound: &'a [u64],
    pub forced: &'a [bool],
    pub proxy: Option<Proxy<'a>>,
}

impl Enumeration<'_> {
    pub fn for_each(&self, mut f: impl FnMut(&[u64], &BigInt)) {
        let k = self.bound.len();
        // suffix[j] = max proxy mass obtainable from coordinates j..k
        let mut suffix = vec![BigInt::zero(); k + 1];
        if let Some(p) = &self.proxy {
            for j in (0..k).rev() {
                let w = p.weights[j]
                    .as_ref()
                    .map_or_else(BigInt::zero, |q| q * BigInt::from(self.bound[j]));
                suffix[j] = &suffix[j + 1] + w;
            }
            if suffix[0] < p.threshold {
                return;
            }
        }
        let mut x = vec![0u64; k];
        self.rec(0, &mut x, BigInt::zero(), BigInt::zero(), &suffix, &mut f);
    }

    fn rec(
        &self,
        j: usize,
        x: &mut Vec<u64>,
        load: BigInt,
        mass: BigInt,
        suffix: &[BigInt],
        f: &mut impl FnMut(&[u64], &BigInt),
    ) {
        if j == self.bound.len() {
            f(x, &load);
            return;
        }
        let (lo, hi) = if self.forced[j] {
            (self.bound[j], self.bound[j])
        } else {
            (0, self.bound[j])
        };
        let size = self.sizes[j];
        if size.is_none() && lo > 0 {
            return;
        }
        let hi = if size.is_none() { 0 } else { hi };
        let weight = self.proxy.as_ref().and_then(|p| p.weights[j].as_ref());
        let zero = BigInt::zero();
        let p = size.unwrap_or(&zero);
        let mut cur_load = &load + p * BigInt::from(lo);
        let mut cur_mass = match weight {
            Some(q) => &mass + q * BigInt::from(lo),
            None => mass.clone(),
        };
        for c in lo..=hi {
            if c > lo {
                cur_load += p;
                if let Some(q) = weight {
                    cur_mass += q;
                }
            }
            if let Some(cap) = self.cap {
                if &cur_load > cap {
                    break;
                }
            }
            if let Some(pr) = &self.proxy {
                if &cur_mass + &suffix[j + 1] < pr.threshold {
                    continue;
                }
            }
            x[j] = c;
            self.rec(j + 1, x, cur_load.clone(), cur_mass.clone(), suffix, f);
        }
        x[j] = 0;
    }
}
