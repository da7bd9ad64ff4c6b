use crate::model::Instance;
use crate::rational::{Epsilon, Rational};

/// Where a job falls relative to its extended interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JobPlacement {
    pub k: usize,
    /// Inside Ĩ_k proper.
    pub core: bool,
    /// Inside the head gap G̃_k.
    pub head_gap: bool,
}

/// Scale intervals with base n/ε for one offset a: Ĩ_k = [β^{lo_k}, β^{hi_k})
/// with lo_k = 3k + (k−1)/ε + a and hi_k = 3k + k/ε + a.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleIntervalFamily {
    pub epsilon: Epsilon,
    pub offset: u32,
    pub base: u64,
    pub top: usize,
    pub placements: Vec<JobPlacement>,
}

impl ScaleIntervalFamily {
    /// Exponent of the left end of Ĩ_k.
    pub fn core_exponent(&self, k: usize) -> i64 {
        let inv = self.epsilon.inverse() as i64;
        3 * k as i64 + (k as i64 - 1) * inv + self.offset as i64
    }

    /// Exponent of the right end of Ĩ_k (and of Ĩ⁺_k).
    pub fn upper_exponent(&self, k: usize) -> i64 {
        let inv = self.epsilon.inverse() as i64;
        (3 + inv) * k as i64 + self.offset as i64
    }

    fn power(&self, e: i64) -> Rational {
        Rational::from(self.base).pow(e)
    }

    /// Ĩ_k as [left, right).
    pub fn core(&self, k: usize) -> (Rational, Rational) {
        (self.power(self.core_exponent(k)), self.power(self.upper_exponent(k)))
    }

    /// Ĩ⁺_k, three exponents wider on the left.
    pub fn extended(&self, k: usize) -> (Rational, Rational) {
        (self.power(self.core_exponent(k) - 3), self.power(self.upper_exponent(k)))
    }

    /// G̃_k, the lowest exponent band of Ĩ⁺_k.
    pub fn head_gap(&self, k: usize) -> (Rational, Rational) {
        let e = self.core_exponent(k) - 3;
        (self.power(e), self.power(e + 1))
    }

    /// Number of admissible offsets, 1/ε + 4.
    pub fn offset_count(epsilon: Epsilon) -> u32 {
        epsilon.inverse() + 4
    }
}

/// Classifies every job of `instance` for offset `a`.
pub fn build_scale_intervals(instance: &Instance, epsilon: Epsilon, a: u32) -> ScaleIntervalFamily {
    let base = instance.job_count() as u64 * epsilon.inverse() as u64;
    let mut family = ScaleIntervalFamily {
        epsilon,
        offset: a,
        base: base.max(2),
        top: 0,
        placements: Vec::new(),
    };
    let placements: Vec<JobPlacement> = instance
        .processing_times()
        .iter()
        .map(|&p| {
            let p = Rational::from(p);
            let mut k = 0;
            while family.extended(k).1 <= p {
                k += 1;
            }
            let (head_lo, head_hi) = family.head_gap(k);
            JobPlacement {
                k,
                core: family.core(k).0 <= p,
                head_gap: head_lo <= p && p < head_hi,
            }
        })
        .collect();
    family.top = placements.iter().map(|pl| pl.k).max().unwrap_or(0);
    family.placements = placements;
    family
}

/// Job indices split into survivors and head-gap residents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadGapPruning {
    pub kept: Vec<usize>,
    pub removed: Vec<usize>,
}

/// Drops every job lying in a head gap.
pub fn prune_headgap_jobs(family: &ScaleIntervalFamily) -> HeadGapPruning {
    let (removed, kept): (Vec<usize>, Vec<usize>) =
        (0..family.placements.len()).partition(|&j| family.placements[j].head_gap);
    HeadGapPruning { kept, removed }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Epsilon {
        Epsilon::new(2).unwrap()
    }

    #[test]
    fn interval_example() {
        let inst = Instance::new(vec![1, 100], vec![1, 1]).unwrap();
        let f = build_scale_intervals(&inst, half(), 0);
        assert_eq!(f.base, 4);
        assert_eq!(f.core(1), (Rational::from(64u64), Rational::from(1024u64)));
        assert_eq!(f.extended(1), (Rational::one(), Rational::from(1024u64)));
        assert_eq!(f.head_gap(1), (Rational::one(), Rational::from(4u64)));
        assert_eq!(f.placements[0], JobPlacement { k: 1, core: false, head_gap: true });
        assert_eq!(f.placements[1], JobPlacement { k: 1, core: true, head_gap: false });
        assert_eq!(ScaleIntervalFamily::offset_count(half()), 6);
    }

    #[test]
    fn gaps_and_disjointness() {
        let inst = Instance::new(vec![1; 3], vec![1]).unwrap();
        for k_inv in 2..=4 {
            let eps = Epsilon::new(k_inv).unwrap();
            for a in 0..ScaleIntervalFamily::offset_count(eps) {
                let f = build_scale_intervals(&inst, eps, a);
                let gap = Rational::from(f.base).pow(3);
                for k in 1..4 {
                    assert!(f.core(k - 1).1 * gap.clone() <= f.core(k).0);
                    assert_eq!(f.extended(k - 1).1, f.extended(k).0);
                    let (h0, h1) = f.head_gap(k);
                    assert!(f.extended(k).0 <= h0 && h1 <= f.core(k).0);
                }
            }
        }
    }

    #[test]
    fn pruning() {
        let inst = Instance::new(vec![70, 100, 200], vec![1, 1]).unwrap();
        let f = build_scale_intervals(&inst, half(), 0);
        assert_eq!(prune_headgap_jobs(&f).removed, Vec::<usize>::new());
        // base 6: Ĩ⁺_1 = [1, 6^5), head gap [1, 6).
        let inst = Instance::new(vec![2, 50, 3], vec![1, 1]).unwrap();
        let f = build_scale_intervals(&inst, half(), 0);
        let pr = prune_headgap_jobs(&f);
        assert_eq!(pr.kept, vec![1]);
        assert_eq!(pr.removed, vec![0, 2]);
    }

    #[test]
    fn every_job_in_exactly_one_extended_interval() {
        let inst = Instance::new((1..=40).map(|x| x * x * x).collect(), vec![1, 1]).unwrap();
        for a in 0..6 {
            let f = build_scale_intervals(&inst, half(), a);
            for (j, pl) in f.placements.iter().enumerate() {
                let p = Rational::from(inst.processing_times()[j]);
                let hits = (0..=f.top + 1)
                    .filter(|&k| {
                        let (lo, hi) = f.extended(k);
                        lo <= p && p < hi
                    })
                    .collect::<Vec<_>>();
                assert_eq!(hits, vec![pl.k]);
            }
        }
    }
}
