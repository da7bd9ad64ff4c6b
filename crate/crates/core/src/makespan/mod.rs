//! Expected-makespan approximation scheme: guess rounded bag sizes, pack
//! the jobs into the guessed bags, and keep the guess whose rounded bag
//! multiset has the smallest expected makespan.

mod guess;
mod ladder;

pub use guess::{
    enumerate_guesses, evaluate_guess, has_volume, pack_into_guess, recipe_guess, GuessIter,
    GuessVector,
};
pub use ladder::{build_ladder, ceil_log, floor_log, ScaledCapacities, SizeClassLadder};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::eval::{expected_value, Evaluator};
use crate::model::{Bagging, Instance, Objective};
use crate::rational::{Epsilon, Rational};

/// Result of [`solve_makespan`] with search counters.
#[derive(Debug, Clone)]
pub struct MakespanOutcome {
    pub bagging: Bagging,
    /// Exact expected makespan of `bagging`.
    pub value: Rational,
    /// Σ q_m z(guess, m) of the chosen guess; absent on the M ≥ n shortcut.
    pub proxy: Option<Rational>,
    pub guess: Option<GuessVector>,
    pub ladder_len: usize,
    pub guesses_enumerated: u64,
    pub guesses_packed: u64,
}

/// Runs the guessing scheme and returns the best packing found.
pub fn solve_makespan(instance: &Instance, epsilon: Epsilon, budget: &Budget) -> Result<MakespanOutcome> {
    let max_bags = instance.max_machines();
    if max_bags >= instance.job_count() {
        let bagging = Bagging::singletons(instance.job_count());
        let value = expected_value(&bagging, instance, Objective::Makespan, Evaluator::Exact, budget)?;
        return Ok(MakespanOutcome {
            bagging,
            value,
            proxy: None,
            guess: None,
            ladder_len: 0,
            guesses_enumerated: 0,
            guesses_packed: 0,
        });
    }
    let ladder = build_ladder(instance, epsilon)?;
    let scaled = ladder.scaled()?;
    let total = instance.total_size();
    let scenarios: Vec<(usize, Rational)> = instance
        .active_scenarios()
        .map(|m| (m, instance.probability(m)))
        .collect();

    let mut best: Option<(Rational, GuessVector, Bagging)> = None;
    let mut enumerated = 0u64;
    let mut packed = 0u64;
    for guess in enumerate_guesses(&ladder, max_bags) {
        enumerated += 1;
        if !has_volume(&guess, &scaled, total) {
            continue;
        }
        let with_guess = |e: Error| e.in_stage(&format!("guess {guess}"));
        // The proxy is cheaper than packing, so reject dominated guesses first.
        let mut proxy = Rational::zero();
        for (m, q) in &scenarios {
            proxy = proxy + q * &evaluate_guess(&guess, *m, &scaled, budget).map_err(with_guess)?;
        }
        if best.as_ref().is_some_and(|(b, _, _)| proxy >= *b) {
            continue;
        }
        let Some(bagging) = pack_into_guess(instance, &guess, &scaled, budget).map_err(with_guess)? else {
            continue;
        };
        packed += 1;
        best = Some((proxy, guess, bagging));
    }
    let (proxy, guess, bagging) =
        best.ok_or_else(|| Error::Internal("no guess could be packed".into()))?;
    let value = expected_value(&bagging, instance, Objective::Makespan, Evaluator::Exact, budget)?;
    Ok(MakespanOutcome {
        bagging,
        value,
        proxy: Some(proxy),
        guess: Some(guess),
        ladder_len: ladder.len(),
        guesses_enumerated: enumerated,
        guesses_packed: packed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::optimal_bagging;
    use proptest::prelude::*;

    fn eps(k: u32) -> Epsilon {
        Epsilon::new(k).unwrap()
    }

    fn bound(k: u32) -> Rational {
        let e = eps(k);
        e.growth_pow(2) * (Rational::one() + Rational::from(5u64) * e.value())
    }

    #[test]
    fn small_example_within_bound() {
        let inst = Instance::new(vec![3, 1], vec![1, 1]).unwrap();
        let out = solve_makespan(&inst, eps(4), &Budget::default()).unwrap();
        assert!(out.value <= bound(4) * Rational::new(7, 2));
        let inst = Instance::new(vec![3, 1, 2], vec![1, 1]).unwrap();
        let out = solve_makespan(&inst, eps(4), &Budget::default()).unwrap();
        let (_, opt) = optimal_bagging(&inst, Objective::Makespan, &Budget::default()).unwrap();
        assert!(out.value <= bound(4) * opt);
        assert!(out.guesses_enumerated as usize >= out.guesses_packed as usize);
    }

    #[test]
    fn one_point_single_machine_is_total() {
        let inst = Instance::new(vec![5, 3, 9, 1], vec![1]).unwrap();
        let out = solve_makespan(&inst, eps(2), &Budget::default()).unwrap();
        assert_eq!(out.value, Rational::from(18u64));
    }

    #[test]
    fn equal_pair_is_split() {
        for k in [1u64, 7, 30] {
            let inst = Instance::new(vec![k, k], vec![0, 1]).unwrap();
            let out = solve_makespan(&inst, eps(4), &Budget::default()).unwrap();
            assert_eq!(out.value, Rational::from(k));
            assert_eq!(out.bagging.bag_count(), 2);
        }
    }

    #[test]
    fn guessing_path_splits_when_profitable() {
        let inst = Instance::new(vec![5, 5, 1], vec![0, 1]).unwrap();
        let out = solve_makespan(&inst, eps(2), &Budget::default()).unwrap();
        assert!(out.guess.is_some());
        assert!(out.bagging.validate(&inst).is_ok());
        assert_eq!(out.value, Rational::from(6u64));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn scaling_by_growth_power_shifts_classes(p in proptest::collection::vec(1u64..9, 3..6), w in proptest::collection::vec(0u64..3, 2..3), j in 1u32..3) {
            // p·k^j and p·(k+1)^j differ by the factor (1+ε)^j exactly.
            prop_assume!(w.iter().any(|&x| x > 0));
            let base = Instance::new(p.iter().map(|x| x * 2u64.pow(j)).collect(), w.clone()).unwrap();
            let grown = Instance::new(p.iter().map(|x| x * 3u64.pow(j)).collect(), w).unwrap();
            let a = solve_makespan(&base, eps(2), &Budget::default()).unwrap();
            let b = solve_makespan(&grown, eps(2), &Budget::default()).unwrap();
            prop_assert_eq!(a.value * eps(2).growth_pow(j as i64), b.value);
            prop_assert_eq!(a.ladder_len, b.ladder_len);
            if let (Some(ga), Some(gb)) = (a.guess, b.guess) {
                prop_assert_eq!(ga.ell_min + j as i64, gb.ell_min);
                prop_assert_eq!(ga.counts, gb.counts);
                prop_assert_eq!(ga.sand, gb.sand);
            }
        }
    }
}
