use crate::error::{Error, Result};

use super::config::{bounded_multisets, enumerate_configs};
use super::intervals::{Estimate, InnerIntervalIndex};

/// One bag of a root guess with its explicitly placed jobs p⁺(B).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessedBag {
    pub estimate: Estimate,
    /// Per-class counts over J_k then J_{k−1} for the bag's level k.
    pub counts: Vec<u16>,
    pub content: u64,
}

/// Bags of the two top levels, their explicit contents, and m_max^{(K)}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootGuess {
    pub top: Vec<GuessedBag>,
    pub below: Vec<GuessedBag>,
    pub max_scenario: u32,
}

/// Every root guess up to bag and job permutation: estimate multisets for
/// B_K and B_{K−1}, nondecreasing configuration choices per estimate, and
/// m_max ∈ 0..=M. Fails once more than `limit` guesses would be produced.
pub fn root_guess_enumerate(index: &InnerIntervalIndex, max_bags: u32, limit: usize) -> Result<Vec<RootGuess>> {
    let top = index.top;
    let mut out = Vec::new();
    let top_level = &index.levels[top];
    for s_top in bounded_multisets(top_level.estimates.len(), max_bags) {
        let used_top: u32 = s_top.iter().sum();
        let (sizes, counts) = class_table(index, top);
        for (top_bags, remaining) in assignments(index, top, &s_top, &sizes, counts) {
            let below_options: Vec<Vec<GuessedBag>> = if top == 0 {
                vec![Vec::new()]
            } else {
                let k = top - 1;
                let (sizes_b, mut counts_b) = class_table(index, k);
                let nk_top = index.levels[top].classes.len();
                // J_{K−1} jobs already used by B_K are unavailable below.
                for (i, c) in remaining[nk_top..].iter().enumerate() {
                    counts_b[i] = *c;
                }
                bounded_multisets(index.levels[k].estimates.len(), max_bags - used_top)
                    .into_iter()
                    .flat_map(|s_below| {
                        assignments(index, k, &s_below, &sizes_b, counts_b.clone())
                            .into_iter()
                            .map(|(bags, _)| bags)
                            .collect::<Vec<_>>()
                    })
                    .collect()
            };
            for below in below_options {
                for m in 0..=max_bags {
                    if out.len() >= limit {
                        return Err(Error::capacity(
                            "root_guess_enumerate",
                            format!("more than {limit} root guesses"),
                        ));
                    }
                    out.push(RootGuess {
                        top: top_bags.clone(),
                        below: below.clone(),
                        max_scenario: m,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// (S, S̄, T) of a root guess, or `None` when T would be negative.
/// S̄ counts per-bag shortfalls, so overfull bags of B_{K−1} contribute 0;
/// T excludes the J_{K−2} volume already placed into B_{K−1}.
pub fn residual_demands(guess: &RootGuess, index: &InnerIntervalIndex) -> Option<(u64, u64, u64)> {
    let shortfall = |bags: &[GuessedBag]| -> u64 {
        bags.iter().map(|b| b.estimate.target.saturating_sub(b.content)).sum()
    };
    let s = shortfall(&guess.top);
    let s_bar = shortfall(&guess.below);
    if index.top < 2 {
        return (s == 0 && s_bar == 0).then_some((0, 0, 0));
    }
    let k = index.top - 1;
    let nk = index.levels[k].classes.len();
    let placed: u64 = guess
        .below
        .iter()
        .map(|b| {
            b.counts[nk..]
                .iter()
                .zip(&index.levels[k - 1].classes)
                .map(|(&c, class)| c as u64 * class.size)
                .sum::<u64>()
        })
        .sum();
    let small = index.volume_through(index.top - 2);
    small.checked_sub(placed + s + s_bar).map(|t| (s, s_bar, t))
}

fn class_table(index: &InnerIntervalIndex, k: usize) -> (Vec<u64>, Vec<u16>) {
    let mut sizes = Vec::new();
    let mut counts = Vec::new();
    let levels = if k == 0 { vec![0] } else { vec![k, k - 1] };
    for l in levels {
        for class in &index.levels[l].classes {
            sizes.push(class.size);
            counts.push(class.jobs.len() as u16);
        }
    }
    (sizes, counts)
}

/// Bag lists for estimate multiset `s` at level k, with the class counts left over.
fn assignments(
    index: &InnerIntervalIndex,
    k: usize,
    s: &[u32],
    sizes: &[u64],
    counts: Vec<u16>,
) -> Vec<(Vec<GuessedBag>, Vec<u16>)> {
    let estimates = &index.levels[k].estimates;
    let mut slots: Vec<usize> = Vec::new();
    for (e, &c) in s.iter().enumerate() {
        slots.extend(std::iter::repeat_n(e, c as usize));
    }
    let configs: Vec<_> = estimates
        .iter()
        .map(|e| enumerate_configs(sizes, &counts, e.max_content))
        .collect();
    let mut out = Vec::new();
    let mut bags = Vec::new();
    let mut remaining = counts;

    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        min_cfg: usize,
        slots: &[usize],
        estimates: &[Estimate],
        configs: &[Vec<super::config::Config>],
        remaining: &mut Vec<u16>,
        bags: &mut Vec<GuessedBag>,
        out: &mut Vec<(Vec<GuessedBag>, Vec<u16>)>,
    ) {
        if i == slots.len() {
            out.push((bags.clone(), remaining.clone()));
            return;
        }
        let e = slots[i];
        let start = if i > 0 && slots[i - 1] == e { min_cfg } else { 0 };
        for (ci, cfg) in configs[e].iter().enumerate().skip(start) {
            if cfg.counts.iter().zip(remaining.iter()).any(|(&c, &r)| c > r) {
                continue;
            }
            for (r, &c) in remaining.iter_mut().zip(&cfg.counts) {
                *r -= c;
            }
            bags.push(GuessedBag {
                estimate: estimates[e].clone(),
                counts: cfg.counts.clone(),
                content: cfg.content,
            });
            go(i + 1, ci, slots, estimates, configs, remaining, bags, out);
            bags.pop();
            for (r, &c) in remaining.iter_mut().zip(&cfg.counts) {
                *r += c;
            }
        }
    }
    go(0, 0, &slots, estimates, &configs, &mut remaining, &mut bags, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Epsilon;

    fn half() -> Epsilon {
        Epsilon::new(2).unwrap()
    }

    #[test]
    fn single_top_job_forces_its_bag() {
        // One job of size 12 at level 1 with nothing below.
        let index = InnerIntervalIndex::new(&[12], half());
        assert_eq!(index.top, 1);
        let guesses = root_guess_enumerate(&index, 1, 10_000).unwrap();
        let with_job: Vec<_> = guesses
            .iter()
            .filter(|g| g.top.len() == 1 && g.top[0].content == 12 && g.max_scenario == 1)
            .collect();
        assert!(!with_job.is_empty());
        for g in &with_job {
            assert!(g.top[0].estimate.max_content >= 12);
            assert!(g.top[0].estimate.target <= 12);
        }
    }

    #[test]
    fn empty_guess_counts() {
        let index = InnerIntervalIndex::new(&[1], half());
        let guesses = root_guess_enumerate(&index, 2, 10_000).unwrap();
        let empty: Vec<_> = guesses.iter().filter(|g| g.top.is_empty() && g.below.is_empty()).collect();
        assert_eq!(empty.len(), 3);
    }

    #[test]
    fn shortfall_and_dummy_volume() {
        // A level-2 job of 84 and ten unit jobs; estimate ℓ=11 has target 87.
        let mut sizes = vec![84u64];
        sizes.extend(std::iter::repeat_n(1u64, 10));
        let index = InnerIntervalIndex::new(&sizes, half());
        assert_eq!(index.top, 2);
        let estimate = index.levels[2].estimates.iter().find(|e| e.ell == 11).cloned().unwrap();
        assert_eq!(estimate.target, 87);
        let guess = RootGuess {
            top: vec![GuessedBag { estimate, counts: vec![1], content: 84 }],
            below: Vec::new(),
            max_scenario: 1,
        };
        assert_eq!(residual_demands(&guess, &index), Some((3, 0, 7)));
    }

    #[test]
    fn shortfall_arithmetic() {
        let index = InnerIntervalIndex::new(&[1], half());
        let bag = |target, content| GuessedBag {
            estimate: Estimate { ell: 0, target, max_content: target },
            counts: vec![0],
            content,
        };
        let guess = RootGuess { top: vec![bag(8, 5), bag(3, 4)], below: Vec::new(), max_scenario: 1 };
        // S = 3 + 0, but nothing below the top level can cover it.
        assert_eq!(residual_demands(&guess, &index), None);
        let none = RootGuess { top: Vec::new(), below: Vec::new(), max_scenario: 0 };
        assert_eq!(residual_demands(&none, &index), Some((0, 0, 0)));
    }
}
