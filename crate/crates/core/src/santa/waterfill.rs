use crate::eval::water_level;
use crate::oracle::PartitionCursor;

/// ALG(m) before the floor test: large bags each take a machine; the
/// estimate targets are grouped onto the other m − large machines in the
/// best way, and T unit dummy jobs are water-filled on top.
/// `None` when no machine is left for the estimate bags.
pub fn waterfill_value(targets: &[u64], large_bag_count: usize, dummy_volume: u64, m: usize) -> Option<u64> {
    let free = m.checked_sub(large_bag_count).filter(|&f| f > 0)?;
    if targets.is_empty() {
        return Some(dummy_volume / free as u64);
    }
    let mut best = 0u128;
    let mut loads = vec![0u128; free];
    for partition in PartitionCursor::new(targets.len(), free) {
        loads.iter_mut().for_each(|l| *l = 0);
        for (block, bag) in partition.bags().iter().enumerate() {
            loads[block] = bag.iter().map(|&i| targets[i] as u128).sum();
        }
        best = best.max(water_level(&loads, dummy_volume as u128));
    }
    Some(best as u64)
}

/// ALG(m), or `None` (guess rejected) when below `floor = num/den`.
pub fn waterfill_evaluate(
    targets: &[u64],
    large_bag_count: usize,
    dummy_volume: u64,
    m: usize,
    floor: (u128, u128),
) -> Option<u64> {
    let value = waterfill_value(targets, large_bag_count, dummy_volume, m)?;
    (value as u128 * floor.1 >= floor.0).then_some(value)
}

/// (1+ε)^{-1}(1/ε)^{3k} as a fraction for level k and ε = 1/inv.
pub fn level_floor(inv: u32, k: usize) -> (u128, u128) {
    let inv = inv as u128;
    (inv.pow(3 * k as u32 + 1), inv + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        // Loads [3,0,0] with T=4: one bag of 3, two empty machines.
        assert_eq!(waterfill_value(&[3], 0, 4, 3), Some(2));
        assert_eq!(waterfill_value(&[3, 2], 0, 0, 2), Some(2));
        assert_eq!(waterfill_value(&[], 0, 5, 1), Some(5));
    }

    #[test]
    fn large_bags_take_machines() {
        assert_eq!(waterfill_value(&[4, 4], 1, 0, 3), Some(4));
        assert_eq!(waterfill_value(&[4, 4], 2, 0, 2), None);
        assert_eq!(waterfill_value(&[5, 3, 2], 0, 0, 2), Some(5));
    }

    #[test]
    fn floor_rejects() {
        let floor = level_floor(2, 1);
        assert_eq!(floor, (16, 3));
        assert_eq!(waterfill_evaluate(&[6], 0, 0, 1, floor), Some(6));
        assert_eq!(waterfill_evaluate(&[5], 0, 0, 1, floor), None);
        assert_eq!(waterfill_evaluate(&[1], 0, 0, 1, level_floor(2, 0)), Some(1));
        assert_eq!(waterfill_evaluate(&[], 0, 0, 1, level_floor(2, 0)), None);
    }
}
