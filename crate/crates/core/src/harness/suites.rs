use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::eval::{capacity_constant, eval_bags_exact, expected_value_of_sizes, Evaluator};
use crate::makespan::{build_ladder, pack_into_guess, recipe_guess, solve_makespan, SizeClassLadder};
use crate::model::{Instance, Objective};
use crate::oracle::{enumerate_baggings, optimal_bagging, optimal_baggings};
use crate::rational::{Epsilon, Rational};
use crate::santa::{round_poly, solve_santa, waterfill_value};

pub const SUITES: [&str; 6] = ["bounds", "makespan-ratio", "santa-ratio", "rounding", "waterfill", "counts"];

/// Outcome of one acceptance criterion over its whole batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub checked: u64,
    pub violations: u64,
    pub detail: String,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {} {}: {} ({} checks, {} violations; {})",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.checked,
            self.violations,
            self.detail
        )
    }
}

fn rng(salt: u64, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ seed)
}

fn weights(rng: &mut ChaCha8Rng, machines: usize) -> Vec<u64> {
    let mut w: Vec<u64> = (0..machines).map(|_| rng.gen_range(0..=2)).collect();
    if w.iter().all(|&x| x == 0) {
        let i = rng.gen_range(0..machines);
        w[i] = 1;
    }
    w
}

fn half() -> Epsilon {
    Epsilon::new(2).expect("valid")
}

/// The 500 instances shared by criteria 2, 3, 4 and 9: n ≤ 7, M ≤ 3, p ≤ 9, w ∈ {0,1,2}.
pub fn bounds_instances() -> Vec<Instance> {
    (0..500)
        .map(|seed| {
            let mut r = rng(2, seed);
            let n = r.gen_range(1..=7);
            let machines = r.gen_range(1..=3);
            let p = (0..n).map(|_| r.gen_range(1..=9)).collect();
            let w = weights(&mut r, machines);
            Instance::new(p, w).expect("generated instance is valid")
        })
        .collect()
}

/// Opt by trying all m^b assignments.
pub fn naive_assignment_value(sizes: &[u64], m: usize, objective: Objective) -> u64 {
    let mut best: Option<u64> = None;
    let mut labels = vec![0usize; sizes.len()];
    loop {
        let mut loads = vec![0u64; m];
        for (i, &s) in sizes.iter().enumerate() {
            loads[labels[i]] += s;
        }
        let v = match objective {
            Objective::Makespan => *loads.iter().max().expect("m ≥ 1"),
            Objective::SantaClaus => *loads.iter().min().expect("m ≥ 1"),
        };
        best = Some(match (best, objective) {
            (None, _) => v,
            (Some(b), Objective::Makespan) => b.min(v),
            (Some(b), Objective::SantaClaus) => b.max(v),
        });
        let mut i = 0;
        loop {
            if i == labels.len() {
                return best.expect("at least one assignment");
            }
            labels[i] += 1;
            if labels[i] < m {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
    }
}

/// Criterion 1: exact evaluation against naive enumeration on 1,000 bag multisets.
pub fn oracle_consistency(budget: &Budget) -> Result<CriterionResult> {
    let outcomes: Vec<u64> = (0..1000u64)
        .into_par_iter()
        .map(|seed| {
            let mut r = rng(1, seed);
            let bags = r.gen_range(1..=7);
            let sizes: Vec<u64> = (0..bags).map(|_| r.gen_range(1..=10)).collect();
            let m = r.gen_range(1..=4);
            let mut bad = 0;
            for objective in [Objective::Makespan, Objective::SantaClaus] {
                if eval_bags_exact(&sizes, m, objective, budget)? != naive_assignment_value(&sizes, m, objective) {
                    bad += 1;
                }
            }
            Ok(bad)
        })
        .collect::<Result<_>>()?;
    Ok(CriterionResult {
        id: 1,
        title: "oracle self-consistency",
        checked: 2000,
        violations: outcomes.iter().sum(),
        detail: "1000 bag multisets, both objectives, exact equality".into(),
    })
}

/// Criterion 2: C ≤ Opt ≤ 4C and every optimal bagging has max bag ≤ 4C.
pub fn bound_sandwich(budget: &Budget) -> Result<CriterionResult> {
    let rows: Vec<(u64, Rational)> = bounds_instances()
        .par_iter()
        .map(|inst| {
            let c = capacity_constant(inst);
            let four_c = Rational::from(4u64) * &c;
            let (optima, opt) = optimal_baggings(inst, Objective::Makespan, budget)?;
            let mut bad = u64::from(opt < c || opt > four_c);
            for b in &optima {
                let largest = b.bag_sizes(inst).into_iter().max().unwrap_or(0);
                bad += u64::from(Rational::from(largest) > four_c);
            }
            Ok((bad, opt / c))
        })
        .collect::<Result<_>>()?;
    let worst = rows.iter().map(|(_, s)| s.clone()).fold(Rational::one(), Rational::max);
    Ok(CriterionResult {
        id: 2,
        title: "bound sandwich C ≤ Opt ≤ 4C",
        checked: rows.len() as u64,
        violations: rows.iter().map(|(b, _)| b).sum(),
        detail: format!("worst Opt/C = {} ({})", worst, worst.to_decimal(6)),
    })
}

/// Criteria 3 and 4 over the bounds suite for ε ∈ {1/2, 1/4}.
pub fn makespan_ratio(budget: &Budget) -> Result<(CriterionResult, CriterionResult)> {
    struct Row {
        ratio_bad: u64,
        recipe_bad: u64,
        count_bad: u64,
        ratio: Rational,
        guesses: u64,
    }
    let instances = bounds_instances();
    let mut rows = Vec::new();
    for k in [2u32, 4] {
        let eps = Epsilon::new(k)?;
        let bound = eps.growth_pow(2) * (Rational::one() + Rational::from(5u64) * eps.value());
        let size_bound = SizeClassLadder::size_bound(eps);
        let batch: Vec<Row> = instances
            .par_iter()
            .map(|inst| {
                let (opt_bagging, opt) = optimal_bagging(inst, Objective::Makespan, budget)?;
                let out = solve_makespan(inst, eps, budget)?;
                let feasible = out.bagging.validate(inst).is_ok();
                let ratio = &out.value / &opt;
                let ratio_bad = u64::from(!feasible || ratio > bound);
                let ladder = build_ladder(inst, eps)?;
                let packed = match recipe_guess(&opt_bagging, inst, &ladder) {
                    Some(g) => pack_into_guess(inst, &g, &ladder.scaled()?, budget)?.is_some(),
                    None => false,
                };
                let limit = (inst.max_machines() as u128 + 1)
                    .checked_pow(ladder.len() as u32 + 1)
                    .unwrap_or(u128::MAX);
                let count_bad = u64::from(ladder.len() > size_bound || out.guesses_enumerated as u128 > limit);
                Ok(Row {
                    ratio_bad,
                    recipe_bad: u64::from(!packed),
                    count_bad,
                    ratio,
                    guesses: out.guesses_enumerated,
                })
            })
            .collect::<Result<_>>()?;
        rows.push((k, batch));
    }
    let mut detail3 = Vec::new();
    let mut detail4 = Vec::new();
    let (mut v3, mut v4, mut n) = (0, 0, 0);
    for (k, batch) in &rows {
        let worst = batch.iter().map(|r| r.ratio.clone()).fold(Rational::one(), Rational::max);
        let recipe_bad: u64 = batch.iter().map(|r| r.recipe_bad).sum();
        v3 += batch.iter().map(|r| r.ratio_bad).sum::<u64>() + recipe_bad;
        v4 += batch.iter().map(|r| r.count_bad).sum::<u64>();
        n += batch.len() as u64;
        detail3.push(format!(
            "ε=1/{k}: worst ratio {} ({}), recipe unpackable {}",
            worst,
            worst.to_decimal(6),
            recipe_bad
        ));
        detail4.push(format!(
            "ε=1/{k}: |L| ≤ {}, max guesses {}",
            SizeClassLadder::size_bound(Epsilon::new(*k)?),
            batch.iter().map(|r| r.guesses).max().unwrap_or(0)
        ));
    }
    Ok((
        CriterionResult {
            id: 3,
            title: "makespan PTAS ratio ≤ (1+ε)²(1+5ε)",
            checked: n,
            violations: v3,
            detail: detail3.join("; "),
        },
        CriterionResult {
            id: 4,
            title: "guess count ≤ (M+1)^(|L|+1)",
            checked: n,
            violations: v4,
            detail: detail4.join("; "),
        },
    ))
}

/// Criterion 5: Opt(round_poly(I)) ≥ Opt(I / p_min)/(1+ε) at ε = 1/2.
pub fn rounding_safety(budget: &Budget) -> Result<CriterionResult> {
    let eps = half();
    let rows: Vec<(u64, Rational)> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let mut r = rng(5, seed);
            let n = r.gen_range(1..=6);
            let machines = r.gen_range(1..=3);
            let p = (0..n).map(|_| r.gen_range(1..=60)).collect();
            let inst = Instance::new(p, weights(&mut r, machines))?;
            let rounded = round_poly(&inst, eps)?;
            let (_, opt) = optimal_bagging(&inst, Objective::SantaClaus, budget)?;
            let (_, opt_rounded) = optimal_bagging(&rounded.instance, Objective::SantaClaus, budget)?;
            let normalized = opt / Rational::from(rounded.scale);
            let bad = u64::from(opt_rounded.clone() * eps.growth() < normalized);
            let slack = if normalized.is_zero() { Rational::one() } else { opt_rounded / normalized };
            Ok((bad, slack))
        })
        .collect::<Result<_>>()?;
    let worst = rows.iter().map(|(_, s)| s.clone()).fold(Rational::from(u64::MAX), Rational::min);
    Ok(CriterionResult {
        id: 5,
        title: "rounding safety",
        checked: rows.len() as u64,
        violations: rows.iter().map(|(b, _)| b).sum(),
        detail: format!("min Opt(rounded)/Opt(normalized) = {} ({})", worst, worst.to_decimal(6)),
    })
}

/// One configuration meeting the water-fill lemma's preconditions.
#[derive(Debug, Clone)]
pub struct WaterfillCase {
    pub level: u32,
    pub large: Vec<u64>,
    pub targets: Vec<u64>,
    pub estimate_bags: Vec<u64>,
    pub small_bags: Vec<u64>,
    pub dummy: u64,
    pub m: usize,
}

/// Level K ∈ {1,2} at ε = 1/2; estimate bags with targets in I_K ∪ I_{K−1}
/// and sizes in [(1+ε)^ℓ, (1+ε)^{ℓ+1}); large bags of (1/ε)^{3K+3}; small
/// bags of at most ε(1/ε)^{3K} with T/(1+ε) ≤ total ≤ T.
pub fn waterfill_case(seed: u64) -> WaterfillCase {
    let eps = half();
    let g = eps.growth();
    let mut r = rng(6, seed);
    let level = r.gen_range(1..=2u32);
    let lower = 8u64.pow(level - 1);
    let upper = 8u64.pow(level + 1);
    let ells: Vec<i64> = (0..40)
        .filter(|&l| {
            let t = g.pow(l).ceil_u64().expect("small");
            (lower..upper).contains(&t)
        })
        .collect();
    let large_count = r.gen_range(0..=2);
    let large = vec![8u64.pow(level + 1); large_count];
    let estimate_count = r.gen_range(1..=5);
    let mut targets = Vec::new();
    let mut estimate_bags = Vec::new();
    for _ in 0..estimate_count {
        let l = ells[r.gen_range(0..ells.len())];
        let t = g.pow(l).ceil_u64().expect("small");
        let top = g.pow(l + 1).ceil_u64().expect("small") - 1;
        targets.push(t);
        estimate_bags.push(r.gen_range(t..=top.max(t)));
    }
    let dummy = r.gen_range(0..=40u64);
    let cap = 8u64.pow(level) / 2;
    let min_total = (dummy * 2).div_ceil(3);
    let total = r.gen_range(min_total..=dummy);
    let mut small_bags = Vec::new();
    let mut left = total;
    while left > 0 {
        let s = r.gen_range((cap / 2).max(1)..=cap).min(left);
        small_bags.push(s);
        left -= s;
    }
    let m = r.gen_range(large_count + 1..=5);
    WaterfillCase {
        level,
        large,
        targets,
        estimate_bags,
        small_bags,
        dummy,
        m,
    }
}

/// Criterion 6: Opt ∈ [(1+ε)^{-5}·ALG, (1+ε)·ALG) whenever Opt reaches the floor.
pub fn waterfill_sandwich(budget: &Budget) -> Result<CriterionResult> {
    let eps = half();
    let rows: Vec<Option<(u64, Rational)>> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let case = waterfill_case(seed);
            let alg = waterfill_value(&case.targets, case.large.len(), case.dummy, case.m)
                .ok_or_else(|| Error::Internal("machine count below large bags".into()))?;
            let mut bags = case.large.clone();
            bags.extend(&case.estimate_bags);
            bags.extend(&case.small_bags);
            let opt = Rational::from(eval_bags_exact(&bags, case.m, Objective::SantaClaus, budget)?);
            let floor = Rational::from(8u64.pow(case.level)) / eps.growth();
            if opt < floor {
                return Ok(None);
            }
            let alg = Rational::from(alg);
            let low = &alg / &eps.growth_pow(5);
            let high = &alg * &eps.growth();
            let bad = u64::from(opt < low || opt >= high);
            Ok(Some((bad, opt / alg)))
        })
        .collect::<Result<_>>()?;
    let applicable: Vec<&(u64, Rational)> = rows.iter().flatten().collect();
    let lo = applicable.iter().map(|(_, r)| r.clone()).fold(Rational::from(u64::MAX), Rational::min);
    let hi = applicable.iter().map(|(_, r)| r.clone()).fold(Rational::zero(), Rational::max);
    Ok(CriterionResult {
        id: 6,
        title: "water-fill sandwich",
        checked: applicable.len() as u64,
        violations: applicable.iter().map(|(b, _)| b).sum(),
        detail: format!(
            "200 configurations, {} above the floor; Opt/ALG in [{}, {}]",
            applicable.len(),
            lo.to_decimal(6),
            hi.to_decimal(6)
        ),
    })
}

/// The 300 rounded instances of criterion 7 followed by the tiny-jobs instances.
pub fn santa_instances() -> Vec<(Instance, bool)> {
    let table = [1u64, 2, 3, 4, 6, 8, 12, 18];
    let mut out: Vec<(Instance, bool)> = (0..300u64)
        .map(|seed| {
            let mut r = rng(7, seed);
            let n = r.gen_range(2..=6);
            let machines = r.gen_range(1..=3usize.min(n - 1));
            let p = (0..n).map(|_| table[r.gen_range(0..table.len())]).collect();
            let w = weights(&mut r, machines);
            (Instance::new(p, w).expect("valid"), false)
        })
        .collect();
    // One unit job and M−1 jobs of ε/(2M), scaled by 2M/ε, all weight on m = M.
    for (p, machines) in [(vec![8u64, 1], 2usize), (vec![12, 1, 1], 3), (vec![26, 1, 1, 1], 3), (vec![12, 1, 1, 1, 1], 3)] {
        let mut w = vec![0; machines];
        w[machines - 1] = 1;
        out.push((Instance::new(p, w).expect("valid"), true));
    }
    out
}

/// Criteria 7 and 8 over the same runs.
pub fn santa_ratio(budget: &Budget) -> Result<(CriterionResult, CriterionResult)> {
    let eps = half();
    let bound = eps.growth_pow(12);
    struct Row {
        bad: u64,
        ratio: Option<Rational>,
        fills: u64,
        fill_bad: u64,
        fallbacks: u64,
    }
    let rows: Vec<Row> = santa_instances()
        .par_iter()
        .map(|(inst, must_be_positive)| {
            let out = solve_santa(inst, eps, budget)?;
            let (_, opt) = optimal_bagging(inst, Objective::SantaClaus, budget)?;
            let feasible = out.bagging.validate(inst).is_ok();
            let within = out.value.clone() * &bound >= opt;
            let positive = !must_be_positive || out.value.is_positive();
            let ratio = if out.value.is_zero() {
                opt.is_zero().then(Rational::one)
            } else {
                Some(&opt / &out.value)
            };
            Ok(Row {
                bad: u64::from(!(feasible && within && positive)),
                ratio,
                fills: out.stats.fill_records.len() as u64,
                fill_bad: out.stats.fill_records.iter().filter(|r| !r.floor_ok).count() as u64,
                fallbacks: out.stats.fallbacks as u64,
            })
        })
        .collect::<Result<_>>()?;
    let worst = rows
        .iter()
        .map(|r| r.ratio.clone())
        .try_fold(Rational::one(), |acc, r| r.map(|r| acc.max(r)));
    let worst = match worst {
        Some(w) => format!("{} ({})", w, w.to_decimal(6)),
        None => "unbounded".into(),
    };
    Ok((
        CriterionResult {
            id: 7,
            title: "Santa Claus PTAS ratio ≥ Opt/(1+ε)^12",
            checked: rows.len() as u64,
            violations: rows.iter().map(|r| r.bad).sum(),
            detail: format!(
                "ε=1/2, empirical worst Opt/ALG {worst}; inner fallbacks {}; the (1+ε)^12 constant is asymptotic, not a sharp prediction",
                rows.iter().map(|r| r.fallbacks).sum::<u64>()
            ),
        },
        CriterionResult {
            id: 8,
            title: "greedy fill floor (1+ε)^-2",
            checked: rows.iter().map(|r| r.fills).sum(),
            violations: rows.iter().map(|r| r.fill_bad).sum(),
            detail: "every bag produced by the final fill across criterion 7's runs".into(),
        },
    ))
}

fn permutations(items: &[u64]) -> Vec<Vec<u64>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Criterion 9: Opt(B,m) nonincreasing in m and expected value invariant
/// under bag order, for every bagging of every bounds-suite instance.
pub fn monotonicity(budget: &Budget) -> Result<CriterionResult> {
    let rows: Vec<(u64, u64)> = bounds_instances()
        .par_iter()
        .map(|inst| {
            let (mut checks, mut bad) = (0u64, 0u64);
            for bagging in enumerate_baggings(inst, budget)? {
                let sizes = bagging.bag_sizes(inst);
                for objective in [Objective::Makespan, Objective::SantaClaus] {
                    let values = (1..=inst.max_machines() + 1)
                        .map(|m| eval_bags_exact(&sizes, m, objective, budget))
                        .collect::<Result<Vec<_>>>()?;
                    checks += 1;
                    bad += u64::from(values.windows(2).any(|w| w[1] > w[0]));
                    let base = expected_value_of_sizes(&sizes, inst, objective, Evaluator::Exact, budget)?;
                    for perm in permutations(&sizes) {
                        checks += 1;
                        let v = expected_value_of_sizes(&perm, inst, objective, Evaluator::Exact, budget)?;
                        bad += u64::from(v != base);
                    }
                }
            }
            Ok((checks, bad))
        })
        .collect::<Result<_>>()?;
    Ok(CriterionResult {
        id: 9,
        title: "monotonicity in m and bag-permutation invariance",
        checked: rows.iter().map(|r| r.0).sum(),
        violations: rows.iter().map(|r| r.1).sum(),
        detail: "all baggings of the 500 bounds-suite instances, both objectives".into(),
    })
}

/// The criteria a named suite covers.
pub fn suite_run(name: &str, budget: &Budget) -> Result<Vec<CriterionResult>> {
    match name {
        "bounds" => Ok(vec![oracle_consistency(budget)?, bound_sandwich(budget)?, monotonicity(budget)?]),
        "makespan-ratio" => {
            let (c3, c4) = makespan_ratio(budget)?;
            Ok(vec![c3, c4])
        }
        "counts" => Ok(vec![makespan_ratio(budget)?.1]),
        "rounding" => Ok(vec![rounding_safety(budget)?]),
        "waterfill" => Ok(vec![waterfill_sandwich(budget)?]),
        "santa-ratio" => {
            let (c7, c8) = santa_ratio(budget)?;
            Ok(vec![c7, c8])
        }
        "" => Err(Error::validation("suite", "empty suite name")),
        other => Err(Error::validation(
            "suite",
            format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naive_values() {
        assert_eq!(naive_assignment_value(&[3, 2, 2], 2, Objective::Makespan), 4);
        assert_eq!(naive_assignment_value(&[3, 2, 2], 2, Objective::SantaClaus), 3);
        assert_eq!(naive_assignment_value(&[5], 3, Objective::SantaClaus), 0);
    }

    #[test]
    fn suite_names() {
        assert!(matches!(suite_run("", &Budget::default()), Err(Error::Validation { .. })));
        assert!(matches!(suite_run("speed", &Budget::default()), Err(Error::Validation { .. })));
    }

    #[test]
    fn generated_batches_are_stable() {
        assert_eq!(bounds_instances(), bounds_instances());
        assert_eq!(bounds_instances().len(), 500);
        assert_eq!(santa_instances().len(), 304);
        let case = waterfill_case(3);
        assert!(case.small_bags.iter().sum::<u64>() <= case.dummy);
        assert!(case.targets.len() == case.estimate_bags.len() && case.targets.len() <= 5);
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(&[1, 2, 3]).len(), 6);
    }
}
