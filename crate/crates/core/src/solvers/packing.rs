//! Backtracking search for (balanced) bin packings of small item lists.

use num_bigint::BigInt;
use num_traits::Zero;

/// Places `items` into bins with the given capacities, at most `per_bin`
/// items per bin when set. Returns the bin index of every item.
pub(crate) fn assign_items(items: &[BigInt], caps: &[BigInt], per_bin: Option<usize>) -> Option<Vec<usize>> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| items[b].cmp(&items[a]).then(a.cmp(&b)));
    if let Some(q) = per_bin {
        if items.len() > q.saturating_mul(caps.len()) {
            return None;
        }
    }
    let mut suffix = vec![BigInt::zero(); order.len() + 1];
    for t in (0..order.len()).rev() {
        suffix[t] = &suffix[t + 1] + &items[order[t]];
    }
    let mut search = Search {
        items,
        order: &order,
        suffix: &suffix,
        residual: caps.to_vec(),
        count: vec![0; caps.len()],
        per_bin,
        placed: vec![usize::MAX; items.len()],
    };
    search.rec(0).then_some(search.placed)
}

struct Search<'a> {
    items: &'a [BigInt],
    order: &'a [usize],
    suffix: &'a [BigInt],
    residual: Vec<BigInt>,
    count: Vec<usize>,
    per_bin: Option<usize>,
    placed: Vec<usize>,
}

impl Search<'_> {
    fn open(&self, b: usize) -> bool {
        self.per_bin.is_none_or(|q| self.count[b] < q)
    }

    fn rec(&mut self, t: usize) -> bool {
        if t == self.order.len() {
            return true;
        }
        let room: BigInt = (0..self.residual.len())
            .filter(|&b| self.open(b))
            .map(|b| self.residual[b].clone())
            .sum();
        if self.suffix[t] > room {
            return false;
        }
        let item = self.order[t];
        let size = &self.items[item];
        let mut tried: Vec<(BigInt, usize)> = Vec::new();
        for b in 0..self.residual.len() {
            if !self.open(b) || size > &self.residual[b] {
                continue;
            }
            // bins with equal residual and fill count are interchangeable
            let key = (self.residual[b].clone(), self.count[b]);
            if tried.contains(&key) {
                continue;
            }
            tried.push(key);
            self.residual[b] -= size;
            self.count[b] += 1;
            self.placed[item] = b;
            if self.rec(t + 1) {
                return true;
            }
            self.residual[b] += size;
            self.count[b] -= 1;
        }
        self.placed[item] = usize::MAX;
        false
    }
}

fn to_big(v: &[u64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// A packing of `items` into `bins` bins of size `capacity`, as item→bin map.
pub fn packing_search(items: &[u64], bins: usize, capacity: u64) -> Option<Vec<usize>> {
    assign_items(&to_big(items), &vec![BigInt::from(capacity); bins], None)
}

/// Like [`packing_search`] with exactly `items.len() / bins` items per bin.
/// Returns `None` when the item count is not divisible by `bins`.
pub fn balanced_packing_search(items: &[u64], bins: usize, capacity: u64) -> Option<Vec<usize>> {
    if bins == 0 {
        return items.is_empty().then(Vec::new);
    }
    if !items.len().is_multiple_of(bins) {
        return None;
    }
    assign_items(
        &to_big(items),
        &vec![BigInt::from(capacity); bins],
        Some(items.len() / bins),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    // Oracle: try every item→bin labeling.
    fn exhaustive(items: &[u64], bins: usize, cap: u64, balanced: bool) -> bool {
        if bins == 0 {
            return items.is_empty();
        }
        let n = items.len();
        let total = (bins as u64).pow(n as u32);
        (0..total).any(|mut code| {
            let mut load = vec![0u64; bins];
            let mut cnt = vec![0usize; bins];
            for &s in items {
                let b = (code % bins as u64) as usize;
                code /= bins as u64;
                load[b] += s;
                cnt[b] += 1;
            }
            load.iter().all(|&l| l <= cap) && (!balanced || cnt.iter().all(|&c| c * bins == n))
        })
    }

    fn check(items: &[u64], bins: usize, cap: u64, balanced: bool) {
        let got = if balanced {
            balanced_packing_search(items, bins, cap)
        } else {
            packing_search(items, bins, cap)
        };
        assert_eq!(
            got.is_some(),
            exhaustive(items, bins, cap, balanced),
            "{items:?} k={bins} B={cap} bal={balanced}"
        );
        if let Some(map) = got {
            let mut load = vec![0u64; bins];
            let mut cnt = vec![0usize; bins];
            for (t, &b) in map.iter().enumerate() {
                load[b] += items[t];
                cnt[b] += 1;
            }
            assert!(load.iter().all(|&l| l <= cap));
            if balanced {
                assert!(cnt.iter().all(|&c| c * bins == items.len()));
            }
        }
    }

    #[test]
    fn small_examples() {
        check(&[1, 2, 3], 2, 3, false);
        check(&[2, 3, 4, 1, 1, 1], 2, 6, true);
        check(&[1, 1, 2, 2], 2, 3, true);
        check(&[1, 1, 1, 3], 2, 3, true);
        check(&[2, 2, 2], 2, 3, false);
        check(&[], 1, 0, false);
    }

    #[test]
    fn against_exhaustive_grid() {
        let mut items = Vec::new();
        for code in 0..4u32.pow(5) {
            items.clear();
            let mut c = code;
            let n = (code % 6) as usize;
            for _ in 0..n {
                items.push((c % 4 + 1) as u64);
                c /= 4;
            }
            for bins in 1..=3 {
                for cap in 2..=5 {
                    check(&items, bins, cap, false);
                    check(&items, bins, cap, true);
                }
            }
        }
    }
}
