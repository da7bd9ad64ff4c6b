use crate::error::{Error, Result};

use super::dp::PlannedBag;

/// A bag with its size estimate, grown by greedy filling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilledBag {
    pub level: usize,
    pub ell: i64,
    pub target: u64,
    pub jobs: Vec<usize>,
    pub size: u64,
}

impl FilledBag {
    pub fn from_planned(bag: &PlannedBag) -> Self {
        FilledBag {
            level: bag.level,
            ell: bag.estimate.ell,
            target: bag.estimate.target,
            jobs: bag.jobs.clone(),
            size: bag.content,
        }
    }

    pub fn deficit(&self) -> u64 {
        self.target.saturating_sub(self.size)
    }

    /// Takes jobs from the front of `pool` while they fit under the target.
    /// The pool is expected in ascending size, so the first misfit ends the scan.
    pub fn fill_from(&mut self, pool: &mut Vec<(usize, u64)>) {
        let mut taken = 0;
        for &(job, p) in pool.iter() {
            if self.size + p > self.target {
                break;
            }
            self.jobs.push(job);
            self.size += p;
            taken += 1;
        }
        pool.drain(..taken);
    }
}

/// Final size of a filled bag against the (1+ε)^{-2} floor of its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FillRecord {
    pub level: usize,
    pub ell: i64,
    pub target: u64,
    pub size: u64,
    pub floor_ok: bool,
}

impl FillRecord {
    /// size ≥ target·(inv/(inv+1))², compared in integers.
    pub fn of(bag: &FilledBag, inv: u32) -> Self {
        let inv = inv as u128;
        FillRecord {
            level: bag.level,
            ell: bag.ell,
            target: bag.target,
            size: bag.size,
            floor_ok: bag.size as u128 * (inv + 1) * (inv + 1) >= bag.target as u128 * inv * inv,
        }
    }
}

/// Fills `bags` in order from `leftovers` (ascending size) and appends what
/// remains to the last bag. With no bags the leftovers are handed back.
pub fn greedy_final_fill(bags: &mut [FilledBag], leftovers: Vec<(usize, u64)>) -> Result<Vec<(usize, u64)>> {
    let needed: u64 = bags.iter().map(FilledBag::deficit).sum();
    let available: u64 = leftovers.iter().map(|&(_, p)| p).sum();
    if available < needed {
        return Err(Error::Internal(format!(
            "leftover volume {available} cannot cover deficit {needed}"
        )));
    }
    let mut pool = leftovers;
    for bag in bags.iter_mut() {
        bag.fill_from(&mut pool);
    }
    match bags.last_mut() {
        Some(last) => {
            for (job, p) in pool.drain(..) {
                last.jobs.push(job);
                last.size += p;
            }
            Ok(Vec::new())
        }
        None => Ok(pool),
    }
}
