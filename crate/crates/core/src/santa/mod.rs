mod config;
mod dp;
mod fill;
mod intervals;
mod outer;
mod root;
mod rounding;
mod scale;
mod waterfill;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::eval::{expected_value, Evaluator};
use crate::model::{Bagging, Instance, Objective};
use crate::rational::{Epsilon, Rational};

pub use config::{bounded_multisets, enumerate_configs, Config};
pub use dp::{ChildSelection, DpCell, DpSolution, DpSolver, PlannedBag};
pub use fill::{greedy_final_fill, FillRecord, FilledBag};
pub use intervals::{interval_index, Estimate, InnerIntervalIndex, JobClass, Level};
pub use outer::{outer_dp, OuterOutcome};
pub use root::{residual_demands, root_guess_enumerate, GuessedBag, RootGuess};
pub use rounding::{ratio_exponent, round_poly, round_poly_with_reference, RoundedInstance};
pub use scale::{build_scale_intervals, prune_headgap_jobs, HeadGapPruning, JobPlacement, ScaleIntervalFamily};
pub use waterfill::{level_floor, waterfill_evaluate, waterfill_value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SantaOptions {
    pub child_selection: ChildSelection,
}

/// One inner solve on a subinstance whose sizes span a polynomial range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerOutcome {
    /// Bags over the subinstance's job indices.
    pub bagging: Bagging,
    /// Σ w_m·ALG(m) of the chosen DP path, if the DP found one.
    pub profit: Option<u128>,
    pub fill_records: Vec<FillRecord>,
    pub cells: usize,
    pub fallback_used: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SantaStats {
    pub inner_solves: usize,
    pub cells: usize,
    pub fallbacks: usize,
    pub fill_records: Vec<FillRecord>,
    pub best_offset: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SantaOutcome {
    pub bagging: Bagging,
    pub value: Rational,
    pub stats: SantaStats,
}

fn santa_value(bagging: &Bagging, instance: &Instance, budget: &Budget) -> Result<Rational> {
    expected_value(bagging, instance, Objective::SantaClaus, Evaluator::Exact, budget)
}

/// Rounds `sub`, runs the interval DP, then fills bags greedily.
/// Falls back to an LPT bagging when no DP guess survives.
pub fn solve_inner(
    sub: &Instance,
    epsilon: Epsilon,
    reference_n: usize,
    budget: &Budget,
    options: SantaOptions,
) -> Result<InnerOutcome> {
    let big_m = sub.max_machines();
    if sub.job_count() <= big_m {
        return Ok(InnerOutcome {
            bagging: Bagging::singletons(sub.job_count()),
            profit: None,
            fill_records: Vec::new(),
            cells: 0,
            fallback_used: false,
        });
    }
    let rounded = round_poly_with_reference(sub, epsilon, reference_n).map_err(|e| e.in_stage("round_poly"))?;
    let sizes = rounded.instance.processing_times();
    let index = InnerIntervalIndex::new(sizes, epsilon);
    let mut solver = DpSolver::new(&index, sub.machine_weights(), budget, options.child_selection);
    let top = solver.solve_top().map_err(|e| e.in_stage("dp_solve"))?;
    let cells = solver.cell_count();
    let Some((cell, solution)) = top else {
        return Ok(InnerOutcome {
            bagging: Bagging::lpt(sub.processing_times(), big_m),
            profit: None,
            fill_records: Vec::new(),
            cells,
            fallback_used: true,
        });
    };
    let planned = solver.reconstruct(&cell)?;
    let (bags, fill_records) = fill_planned(&planned, &index, epsilon)?;
    Ok(InnerOutcome {
        bagging: Bagging::new(bags),
        profit: Some(solution.profit),
        fill_records,
        cells,
        fallback_used: false,
    })
}

/// Lower levels first, each bag taking unused jobs at least two levels
/// below it; the topmost nonempty level then takes every leftover.
fn fill_planned(
    planned: &[PlannedBag],
    index: &InnerIntervalIndex,
    epsilon: Epsilon,
) -> Result<(Vec<Vec<usize>>, Vec<FillRecord>)> {
    if planned.is_empty() {
        return Err(Error::Internal("dp returned no bags".into()));
    }
    let mut placed = vec![false; index.sizes.len()];
    for bag in planned {
        for &j in &bag.jobs {
            placed[j] = true;
        }
    }
    let mut pool: Vec<(usize, u64)> = (0..index.sizes.len())
        .filter(|&j| !placed[j])
        .map(|j| (j, index.sizes[j]))
        .collect();
    pool.sort_by_key(|&(j, p)| (p, j));

    let mut bags: Vec<FilledBag> = planned.iter().map(FilledBag::from_planned).collect();
    let top_level = bags.iter().map(|b| b.level).max().expect("nonempty");
    let mut lower: Vec<usize> = (0..bags.len()).filter(|&i| bags[i].level < top_level).collect();
    lower.sort_by_key(|&i| (bags[i].level, i));
    for i in lower {
        let level = bags[i].level;
        if level < 2 {
            continue;
        }
        let (mut eligible, rest): (Vec<_>, Vec<_>) =
            pool.into_iter().partition(|&(j, _)| index.level_of_job[j] + 2 <= level);
        bags[i].fill_from(&mut eligible);
        pool = eligible.into_iter().chain(rest).collect();
        pool.sort_by_key(|&(j, p)| (p, j));
    }

    let (mut top, mut others): (Vec<FilledBag>, Vec<FilledBag>) =
        bags.into_iter().partition(|b| b.level == top_level);
    greedy_final_fill(&mut top, pool).map_err(|e| e.in_stage("greedy_final_fill"))?;
    others.sort_by_key(|b| std::cmp::Reverse(b.level));
    let all: Vec<FilledBag> = top.into_iter().chain(others).collect();
    let records = all.iter().map(|b| FillRecord::of(b, epsilon.inverse())).collect();
    Ok((all.into_iter().map(|b| b.jobs).collect(), records))
}

/// The full pipeline; M ≥ n returns singleton bags, which are optimal.
pub fn solve_santa(instance: &Instance, epsilon: Epsilon, budget: &Budget) -> Result<SantaOutcome> {
    solve_santa_with(instance, epsilon, budget, SantaOptions::default())
}

pub fn solve_santa_with(
    instance: &Instance,
    epsilon: Epsilon,
    budget: &Budget,
    options: SantaOptions,
) -> Result<SantaOutcome> {
    if instance.job_count() <= instance.max_machines() {
        let bagging = Bagging::singletons(instance.job_count());
        let value = santa_value(&bagging, instance, budget)?;
        return Ok(SantaOutcome {
            bagging,
            value,
            stats: SantaStats::default(),
        });
    }
    let outer = outer_dp(instance, epsilon, budget, options)?;
    let stats = SantaStats {
        inner_solves: outer.inner.len(),
        cells: outer.inner.iter().map(|o| o.cells).sum(),
        fallbacks: outer.inner.iter().filter(|o| o.fallback_used).count(),
        fill_records: outer.inner.iter().flat_map(|o| o.fill_records.iter().copied()).collect(),
        best_offset: outer.best_offset,
    };
    Ok(SantaOutcome {
        bagging: outer.bagging,
        value: outer.value,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::optimal_bagging;
    use proptest::prelude::*;

    fn half() -> Epsilon {
        Epsilon::new(2).unwrap()
    }

    fn solve(p: Vec<u64>, w: Vec<u64>) -> SantaOutcome {
        let inst = Instance::new(p, w).unwrap();
        let out = solve_santa(&inst, half(), &Budget::default()).unwrap();
        out.bagging.validate(&inst).unwrap();
        out
    }

    fn optimum(inst: &Instance) -> Rational {
        optimal_bagging(inst, Objective::SantaClaus, &Budget::default()).unwrap().1
    }

    #[test]
    fn trivial_instances() {
        assert_eq!(solve(vec![7], vec![1]).value, Rational::from(7u64));
        assert_eq!(solve(vec![1, 1], vec![0, 1]).value, Rational::one());
        assert_eq!(solve(vec![1, 1, 1], vec![0, 1]).value, Rational::one());
    }

    #[test]
    fn two_scale_jobs_stay_apart() {
        let inst = Instance::new(vec![1, 1_000_000], vec![0, 1]).unwrap();
        let outer = outer_dp(&inst, half(), &Budget::default(), SantaOptions::default()).unwrap();
        assert_eq!(outer.bagging.bag_count(), 2);
        assert_eq!(outer.value, Rational::one());
    }

    #[test]
    fn tiny_jobs_are_not_discarded() {
        let out = solve(vec![24, 1, 1, 1], vec![0, 0, 1]);
        assert!(out.value.is_positive());
        assert_eq!(out.value, Rational::from(2u64).min(out.value.clone()));
    }

    #[test]
    fn balanced_split_on_one_point_distribution() {
        let inst = Instance::new(vec![4, 4, 4, 4, 4, 4], vec![0, 0, 1]).unwrap();
        let out = solve_santa(&inst, half(), &Budget::default()).unwrap();
        assert_eq!(out.value, optimum(&inst));
    }

    #[test]
    fn exhaustive_child_volume_matches_tight() {
        for (p, w) in [
            (vec![1u64, 2, 3, 4, 6], vec![1u64, 1, 1]),
            (vec![8, 1, 1, 2, 3], vec![0, 2, 1]),
            (vec![12, 12, 3, 1, 1, 1], vec![1, 0, 2]),
        ] {
            let inst = Instance::new(p, w).unwrap();
            let tight = solve_santa_with(&inst, half(), &Budget::default(), SantaOptions::default()).unwrap();
            let exh = solve_santa_with(
                &inst,
                half(),
                &Budget::default(),
                SantaOptions { child_selection: ChildSelection::Exhaustive },
            )
            .unwrap();
            assert_eq!(tight.value, exh.value);
        }
    }

    #[test]
    fn deterministic() {
        let inst = Instance::new(vec![6, 4, 3, 2, 2, 1], vec![1, 1, 1]).unwrap();
        let a = solve_santa(&inst, half(), &Budget::default()).unwrap();
        let b = solve_santa(&inst, half(), &Budget::default()).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn feasible_and_within_ratio(
            p in prop::collection::vec(prop::sample::select(vec![1u64, 2, 3, 4, 6, 8, 12, 18]), 2..=6),
            w in prop::collection::vec(0u64..=2, 1..=3),
        ) {
            prop_assume!(w.iter().any(|&x| x > 0));
            let inst = Instance::new(p, w).unwrap();
            let out = solve_santa(&inst, half(), &Budget::default()).unwrap();
            out.bagging.validate(&inst).unwrap();
            let bound = optimum(&inst) / half().growth_pow(12);
            prop_assert!(out.value >= bound);
            prop_assert!(out.stats.fill_records.iter().all(|r| r.floor_ok), "{:?}", out.stats.fill_records);
        }
    }
}
