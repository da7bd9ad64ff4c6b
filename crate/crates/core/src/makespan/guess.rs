use std::fmt;

use crate::budget::Budget;
use crate::error::Result;
use crate::eval::eval_exact_wide;
use crate::model::{Bagging, Instance, Objective};
use crate::oracle::bin_packing_feasible;
use crate::rational::Rational;

use super::ladder::{ScaledCapacities, SizeClassLadder};

/// Bag counts per size class plus the number of sand bags.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GuessVector {
    pub ell_min: i64,
    /// `counts[i]` is M_ℓ for ℓ = `ell_min + i`.
    pub counts: Vec<u32>,
    pub sand: u32,
}

impl GuessVector {
    pub fn total(&self) -> u32 {
        self.counts.iter().sum::<u32>() + self.sand
    }

    pub fn count(&self, ell: i64) -> u32 {
        usize::try_from(ell - self.ell_min)
            .ok()
            .and_then(|i| self.counts.get(i).copied())
            .unwrap_or(0)
    }
}

impl fmt::Display for GuessVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, c)| format!("{}:{}", self.ell_min + i as i64, c))
            .collect();
        write!(f, "{{{}}} sand={}", parts.join(","), self.sand)
    }
}

/// Lexicographic stream of all guesses with at most M bags.
#[derive(Debug, Clone)]
pub struct GuessIter {
    ell_min: i64,
    digits: Vec<u32>,
    limit: u32,
    started: bool,
    done: bool,
}

impl Iterator for GuessIter {
    type Item = GuessVector;

    fn next(&mut self) -> Option<GuessVector> {
        if self.done {
            return None;
        }
        if self.started {
            let mut prefix: Vec<u32> = Vec::with_capacity(self.digits.len());
            let mut acc = 0;
            for &d in &self.digits {
                acc += d;
                prefix.push(acc);
            }
            let pos = (0..self.digits.len()).rev().find(|&i| prefix[i] < self.limit);
            match pos {
                Some(i) => {
                    self.digits[i] += 1;
                    for d in &mut self.digits[i + 1..] {
                        *d = 0;
                    }
                }
                None => {
                    self.done = true;
                    return None;
                }
            }
        }
        self.started = true;
        let (sand, counts) = self.digits.split_last().expect("at least the sand digit");
        Some(GuessVector {
            ell_min: self.ell_min,
            counts: counts.to_vec(),
            sand: *sand,
        })
    }
}

/// Every (M_ℓ)_ℓ, M_sand with Σ ≤ M, each once.
pub fn enumerate_guesses(ladder: &SizeClassLadder, max_bags: usize) -> GuessIter {
    GuessIter {
        ell_min: ladder.ell_min,
        digits: vec![0; ladder.len() + 1],
        limit: max_bags as u32,
        started: false,
        done: false,
    }
}

fn bin_capacities(guess: &GuessVector, scaled: &ScaledCapacities, slack: bool) -> Vec<u64> {
    let (classes, sand) = if slack {
        (&scaled.slack, scaled.sand_slack)
    } else {
        (&scaled.nominal, scaled.sand_nominal)
    };
    let clamp = |v: u128| (v / scaled.denom).min(u64::MAX as u128) as u64;
    let mut bins = Vec::with_capacity(guess.total() as usize);
    for (i, &count) in guess.counts.iter().enumerate() {
        bins.extend(std::iter::repeat_n(clamp(classes[i]), count as usize));
    }
    bins.extend(std::iter::repeat_n(clamp(sand), guess.sand as usize));
    bins
}

/// Σ M_ℓ(1+ε)^{ℓ+2} + M_sand(1+ε)²εC ≥ Σp, the volume needed to pack at all.
pub fn has_volume(guess: &GuessVector, scaled: &ScaledCapacities, total_size: u64) -> bool {
    let capacity: u128 = guess
        .counts
        .iter()
        .zip(&scaled.slack)
        .map(|(&c, &cap)| c as u128 * cap)
        .sum::<u128>()
        + guess.sand as u128 * scaled.sand_slack;
    capacity >= total_size as u128 * scaled.denom
}

/// Packs the jobs into the guessed bags: nominal capacities first, then with (1+ε) slack.
pub fn pack_into_guess(
    instance: &Instance,
    guess: &GuessVector,
    scaled: &ScaledCapacities,
    budget: &Budget,
) -> Result<Option<Bagging>> {
    let sizes = instance.processing_times();
    for slack in [false, true] {
        let bins = bin_capacities(guess, scaled, slack);
        if let Some(witness) = bin_packing_feasible(sizes, &bins, budget)? {
            let mut bags = vec![Vec::new(); bins.len()];
            for (job, &bin) in witness.bin_of_item.iter().enumerate() {
                bags[bin].push(job);
            }
            return Ok(Some(Bagging::new(bags)));
        }
    }
    Ok(None)
}

/// z(guess, m): exact makespan of the rounded bag multiset on m machines.
pub fn evaluate_guess(
    guess: &GuessVector,
    m: usize,
    scaled: &ScaledCapacities,
    budget: &Budget,
) -> Result<Rational> {
    let mut items = Vec::with_capacity(guess.total() as usize);
    for (i, &count) in guess.counts.iter().enumerate() {
        items.extend(std::iter::repeat_n(scaled.nominal[i], count as usize));
    }
    items.extend(std::iter::repeat_n(scaled.sand_nominal, guess.sand as usize));
    let z = eval_exact_wide(&items, m, Objective::Makespan, budget.exact_nodes)?;
    Ok(Rational::new(z, scaled.denom))
}

/// The guess read off a bagging: regular bags by size class, the rest as
/// ⌈volume/(εC)⌉ sand bags.
pub fn recipe_guess(bagging: &Bagging, instance: &Instance, ladder: &SizeClassLadder) -> Option<GuessVector> {
    let eps = ladder.epsilon.value();
    let c = &ladder.capacity_constant;
    let regular_size = &eps * c;
    let regular_job = &(&eps * &eps) * c;
    let p = instance.processing_times();
    let mut counts = vec![0u32; ladder.len()];
    let mut sand_volume = 0u64;
    for bag in bagging.bags() {
        let size: u64 = bag.iter().map(|&j| p[j]).sum();
        let regular = Rational::from(size) >= regular_size
            || bag.iter().any(|&j| Rational::from(p[j]) >= regular_job);
        if regular {
            let ell = ladder.class_of(&Rational::from(size))?;
            counts[(ell - ladder.ell_min) as usize] += 1;
        } else {
            sand_volume += size;
        }
    }
    let sand = (Rational::from(sand_volume) / regular_size).ceil_u64().ok()? as u32;
    Some(GuessVector {
        ell_min: ladder.ell_min,
        counts,
        sand,
    })
}
