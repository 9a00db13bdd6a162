//! Source problems of the reductions: (balanced) bin packing and cutting stock.

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("item {0} has size 0; sizes must be positive")]
    ZeroItem(usize),
    #[error("bin count must be ≥ 1")]
    NoBins,
    #[error("{items} items cannot be split evenly over {bins} bins")]
    NotDivisible { items: usize, bins: usize },
    #[error("cutting stock vectors have inconsistent lengths")]
    Shape,
    #[error("cutting stock entries must be ≥ 0 and item sizes ≥ 1")]
    Sign,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinPackingInstance {
    pub items: Vec<u64>,
    pub bins: usize,
    pub capacity: u64,
}

impl BinPackingInstance {
    pub fn new(items: Vec<u64>, bins: usize, capacity: u64) -> Result<Self, InstanceError> {
        if bins == 0 {
            return Err(InstanceError::NoBins);
        }
        if let Some(t) = items.iter().position(|&a| a == 0) {
            return Err(InstanceError::ZeroItem(t));
        }
        Ok(BinPackingInstance { items, bins, capacity })
    }

    pub fn total_size(&self) -> u64 {
        self.items.iter().sum()
    }

    /// `A = k·B`.
    pub fn total_capacity(&self) -> u64 {
        self.bins as u64 * self.capacity
    }

    pub fn is_tight(&self) -> bool {
        self.total_size() == self.total_capacity()
    }

    pub fn a_max(&self) -> u64 {
        self.items.iter().copied().max().unwrap_or(0)
    }

    pub fn solve(&self) -> Option<Vec<usize>> {
        crate::solvers::packing_search(&self.items, self.bins, self.capacity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BalancedBinPackingInstance {
    pub items: Vec<u64>,
    pub bins: usize,
    pub capacity: u64,
}

impl BalancedBinPackingInstance {
    pub fn new(items: Vec<u64>, bins: usize, capacity: u64) -> Result<Self, InstanceError> {
        let bp = BinPackingInstance::new(items, bins, capacity)?;
        if bp.items.len() % bins != 0 {
            return Err(InstanceError::NotDivisible {
                items: bp.items.len(),
                bins,
            });
        }
        Ok(BalancedBinPackingInstance {
            items: bp.items,
            bins,
            capacity,
        })
    }

    pub fn items_per_bin(&self) -> usize {
        self.items.len() / self.bins
    }

    pub fn total_size(&self) -> u64 {
        self.items.iter().sum()
    }

    pub fn total_capacity(&self) -> u64 {
        self.bins as u64 * self.capacity
    }

    pub fn is_tight(&self) -> bool {
        self.total_size() == self.total_capacity()
    }

    pub fn a_max(&self) -> u64 {
        self.items.iter().copied().max().unwrap_or(0)
    }

    pub fn solve(&self) -> Option<Vec<usize>> {
        crate::solvers::balanced_packing_search(&self.items, self.bins, self.capacity)
    }

    /// Checks that `map` sends exactly `n/k` items to every bin and respects
    /// the capacity.
    pub fn is_valid_packing(&self, map: &[usize]) -> bool {
        if map.len() != self.items.len() || map.iter().any(|&b| b >= self.bins) {
            return false;
        }
        let mut load = vec![0u64; self.bins];
        let mut cnt = vec![0usize; self.bins];
        for (t, &b) in map.iter().enumerate() {
            load[b] += self.items[t];
            cnt[b] += 1;
        }
        let q = self.items_per_bin();
        load.iter().all(|&l| l <= self.capacity) && cnt.iter().all(|&c| c == q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CuttingStockInstance {
    pub item_sizes: Vec<BigInt>,
    pub item_counts: Vec<u64>,
    pub bin_sizes: Vec<BigInt>,
    pub bin_costs: Vec<BigInt>,
    pub budget: Option<BigInt>,
}

impl CuttingStockInstance {
    pub fn new(
        item_sizes: Vec<BigInt>,
        item_counts: Vec<u64>,
        bin_sizes: Vec<BigInt>,
        bin_costs: Vec<BigInt>,
    ) -> Result<Self, InstanceError> {
        let inst = CuttingStockInstance {
            item_sizes,
            item_counts,
            bin_sizes,
            bin_costs,
            budget: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_budget(mut self, budget: BigInt) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        if self.item_sizes.len() != self.item_counts.len() || self.bin_sizes.len() != self.bin_costs.len() {
            return Err(InstanceError::Shape);
        }
        let one = BigInt::from(1);
        if self.item_sizes.iter().any(|p| p < &one)
            || self.bin_sizes.iter().chain(&self.bin_costs).any(|v| v.is_negative())
        {
            return Err(InstanceError::Sign);
        }
        Ok(())
    }

    pub fn item_types(&self) -> usize {
        self.item_sizes.len()
    }

    pub fn bin_types(&self) -> usize {
        self.bin_sizes.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tightness_and_validation() {
        let bp = BinPackingInstance::new(vec![1, 2, 3], 2, 3).unwrap();
        assert!(bp.is_tight());
        assert_eq!(bp.a_max(), 3);
        assert!(bp.solve().is_some());
        assert_eq!(
            BinPackingInstance::new(vec![1, 0], 2, 3),
            Err(InstanceError::ZeroItem(1))
        );
        assert_eq!(BinPackingInstance::new(vec![1], 0, 3), Err(InstanceError::NoBins));
        assert!(matches!(
            BalancedBinPackingInstance::new(vec![1, 2, 3], 2, 3),
            Err(InstanceError::NotDivisible { .. })
        ));
    }

    #[test]
    fn balanced_packings() {
        let bbp0 = BalancedBinPackingInstance::new(vec![1, 1, 2, 2], 2, 3).unwrap();
        assert!(bbp0.is_tight());
        assert!(bbp0.is_valid_packing(&[0, 1, 0, 1]));
        assert!(!bbp0.is_valid_packing(&[0, 0, 1, 1]));
        let map = bbp0.solve().unwrap();
        assert!(bbp0.is_valid_packing(&map));

        let bbp1 = BalancedBinPackingInstance::new(vec![1, 1, 1, 3], 2, 3).unwrap();
        assert!(bbp1.is_tight());
        assert!(bbp1.solve().is_none());
    }
}
