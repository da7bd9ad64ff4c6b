use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::model::{Bagging, Instance, Objective};
use crate::rational::Rational;

/// Bag order for list scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListOrder {
    Given,
    /// Largest bag first.
    Lpt,
}

/// How Opt(B,m) is computed when forming an expected value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluator {
    Exact,
    List(ListOrder),
}

/// max{ max_j p_j, Σp/m }, a lower bound on the makespan with m machines.
pub fn machine_lower_bound(instance: &Instance, m: usize) -> Result<Rational> {
    instance.check_scenario(m)?;
    let avg = Rational::new(instance.total_size(), m as u64);
    Ok(Rational::from(instance.max_size()).max(avg))
}

/// C = Σ_m q_m · machine_lower_bound(m).
pub fn capacity_constant(instance: &Instance) -> Rational {
    instance
        .active_scenarios()
        .map(|m| instance.probability(m) * machine_lower_bound(instance, m).expect("scenario in range"))
        .sum()
}

/// Largest integer level h with Σ max(0, h − load) ≤ volume.
pub fn water_level(loads: &[u128], volume: u128) -> u128 {
    if loads.is_empty() {
        return 0;
    }
    let mut sorted = loads.to_vec();
    sorted.sort_unstable();
    let mut prefix = 0u128;
    for i in 0..sorted.len() {
        prefix += sorted[i];
        let level = (prefix + volume) / (i as u128 + 1);
        if i + 1 == sorted.len() || level < sorted[i + 1] {
            return level;
        }
    }
    unreachable!()
}

/// Exact Opt over assignments of indivisible bags to m machines.
pub fn eval_bags_exact(
    bag_sizes: &[u64],
    m: usize,
    objective: Objective,
    budget: &Budget,
) -> Result<u64> {
    let sizes: Vec<u128> = bag_sizes.iter().map(|&s| s as u128).collect();
    let value = eval_exact_wide(&sizes, m, objective, budget.exact_nodes)?;
    Ok(value as u64)
}

/// Wide-integer variant used when sizes are scaled rationals.
pub(crate) fn eval_exact_wide(
    sizes: &[u128],
    m: usize,
    objective: Objective,
    node_budget: u64,
) -> Result<u128> {
    if m == 0 {
        return Err(Error::Domain("machine count must be positive".into()));
    }
    let mut items = sizes.to_vec();
    items.sort_unstable_by(|a, b| b.cmp(a));
    match objective {
        Objective::Makespan => exact_makespan(&items, m, node_budget),
        Objective::SantaClaus => exact_santa(&items, m, node_budget),
    }
}

struct Search<'a> {
    items: &'a [u128],
    loads: Vec<u128>,
    best: u128,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::capacity(
                "eval_bags_exact",
                format!("node budget {} exhausted on {} bags", self.budget, self.items.len()),
            ));
        }
        Ok(())
    }

    fn has_equal_earlier(&self, j: usize) -> bool {
        self.loads[..j].contains(&self.loads[j])
    }
}

fn exact_makespan(items: &[u128], m: usize, budget: u64) -> Result<u128> {
    let Some(&largest) = items.first() else {
        return Ok(0);
    };
    if m >= items.len() {
        return Ok(largest);
    }
    let total: u128 = items.iter().sum();
    let lower = largest.max(total.div_ceil(m as u128));
    let greedy = list_schedule(items, m, Objective::Makespan);
    if greedy == lower {
        return Ok(greedy);
    }
    let mut s = Search {
        items,
        loads: vec![0; m],
        best: greedy,
        nodes: 0,
        budget,
    };
    fn dfs(s: &mut Search, i: usize, lower: u128) -> Result<()> {
        s.tick()?;
        if i == s.items.len() {
            s.best = s.loads.iter().copied().max().unwrap_or(0);
            return Ok(());
        }
        let item = s.items[i];
        for j in 0..s.loads.len() {
            if s.has_equal_earlier(j) || s.loads[j] + item >= s.best {
                continue;
            }
            s.loads[j] += item;
            dfs(s, i + 1, lower)?;
            s.loads[j] -= item;
            if s.best == lower {
                break;
            }
        }
        Ok(())
    }
    dfs(&mut s, 0, lower)?;
    Ok(s.best)
}

fn exact_santa(items: &[u128], m: usize, budget: u64) -> Result<u128> {
    if m > items.len() {
        return Ok(0);
    }
    let total: u128 = items.iter().sum();
    let upper = total / m as u128;
    let greedy = list_schedule(items, m, Objective::SantaClaus);
    if greedy == upper {
        return Ok(greedy);
    }
    let mut suffix = vec![0u128; items.len() + 1];
    for i in (0..items.len()).rev() {
        suffix[i] = suffix[i + 1] + items[i];
    }
    let mut s = Search {
        items,
        loads: vec![0; m],
        best: greedy,
        nodes: 0,
        budget,
    };
    fn dfs(s: &mut Search, i: usize, suffix: &[u128], upper: u128) -> Result<()> {
        s.tick()?;
        if i == s.items.len() {
            let reached = s.loads.iter().copied().min().unwrap_or(0);
            s.best = s.best.max(reached);
            return Ok(());
        }
        if water_level(&s.loads, suffix[i]) <= s.best {
            return Ok(());
        }
        let item = s.items[i];
        for j in 0..s.loads.len() {
            if s.has_equal_earlier(j) {
                continue;
            }
            s.loads[j] += item;
            dfs(s, i + 1, suffix, upper)?;
            s.loads[j] -= item;
            if s.best == upper {
                break;
            }
        }
        Ok(())
    }
    dfs(&mut s, 0, &suffix, upper)?;
    Ok(s.best)
}

/// Greedy list schedule: each bag goes to the currently least-loaded machine (lowest index on ties).
fn list_schedule(items: &[u128], m: usize, objective: Objective) -> u128 {
    let mut loads = vec![0u128; m];
    for &item in items {
        let j = (0..m).min_by_key(|&j| (loads[j], j)).unwrap_or(0);
        loads[j] += item;
    }
    match objective {
        Objective::Makespan => loads.iter().copied().max().unwrap_or(0),
        Objective::SantaClaus => loads.iter().copied().min().unwrap_or(0),
    }
}

/// Objective value of the greedy list schedule; an upper bound on Opt for
/// makespan and a lower bound for Santa Claus.
pub fn eval_bags_list(bag_sizes: &[u64], m: usize, objective: Objective, order: ListOrder) -> u64 {
    let mut items: Vec<u128> = bag_sizes.iter().map(|&s| s as u128).collect();
    if order == ListOrder::Lpt {
        items.sort_unstable_by(|a, b| b.cmp(a));
    }
    list_schedule(&items, m.max(1), objective) as u64
}

/// Opt(B,m) for every active scenario, ascending in m.
pub fn scenario_values(
    bag_sizes: &[u64],
    instance: &Instance,
    objective: Objective,
    evaluator: Evaluator,
    budget: &Budget,
) -> Result<Vec<(usize, u64)>> {
    instance
        .active_scenarios()
        .map(|m| {
            let v = match evaluator {
                Evaluator::Exact => eval_bags_exact(bag_sizes, m, objective, budget)?,
                Evaluator::List(order) => eval_bags_list(bag_sizes, m, objective, order),
            };
            Ok((m, v))
        })
        .collect()
}

/// Σ_m q_m · value(bag sizes, m) over bag sizes directly.
pub fn expected_value_of_sizes(
    bag_sizes: &[u64],
    instance: &Instance,
    objective: Objective,
    evaluator: Evaluator,
    budget: &Budget,
) -> Result<Rational> {
    let values = scenario_values(bag_sizes, instance, objective, evaluator, budget)?;
    Ok(values
        .into_iter()
        .map(|(m, v)| instance.probability(m) * Rational::from(v))
        .sum())
}

/// Σ_m q_m · Opt(B,m); zero-weight scenarios are skipped.
pub fn expected_value(
    bagging: &Bagging,
    instance: &Instance,
    objective: Objective,
    evaluator: Evaluator,
    budget: &Budget,
) -> Result<Rational> {
    bagging.validate(instance)?;
    expected_value_of_sizes(&bagging.bag_sizes(instance), instance, objective, evaluator, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b() -> Budget {
        Budget::default()
    }

    fn naive(sizes: &[u64], m: usize, objective: Objective) -> u64 {
        if objective == Objective::SantaClaus && m > sizes.len() {
            return 0;
        }
        let mut best: Option<u64> = None;
        let total = (m as u64).pow(sizes.len() as u32);
        for code in 0..total {
            let mut loads = vec![0u64; m];
            let mut c = code;
            for &s in sizes {
                loads[(c % m as u64) as usize] += s;
                c /= m as u64;
            }
            let v = match objective {
                Objective::Makespan => *loads.iter().max().unwrap(),
                Objective::SantaClaus => *loads.iter().min().unwrap(),
            };
            best = Some(match (best, objective) {
                (None, _) => v,
                (Some(b), Objective::Makespan) => b.min(v),
                (Some(b), Objective::SantaClaus) => b.max(v),
            });
        }
        best.unwrap_or(0)
    }

    #[test]
    fn lower_bound_examples() {
        let inst = Instance::new(vec![3, 1], vec![1, 1]).unwrap();
        assert_eq!(machine_lower_bound(&inst, 1).unwrap(), Rational::from(4u64));
        assert_eq!(machine_lower_bound(&inst, 2).unwrap(), Rational::from(3u64));
        assert!(matches!(machine_lower_bound(&inst, 3), Err(Error::Domain(_))));
        let single = Instance::new(vec![5], vec![1, 1, 1]).unwrap();
        assert_eq!(machine_lower_bound(&single, 3).unwrap(), Rational::from(5u64));
    }

    #[test]
    fn capacity_constant_examples() {
        let c = |p: Vec<u64>, w: Vec<u64>| capacity_constant(&Instance::new(p, w).unwrap());
        assert_eq!(c(vec![3, 1], vec![1, 1]), Rational::new(7, 2));
        assert_eq!(c(vec![3, 1], vec![1]), Rational::from(4u64));
        assert_eq!(c(vec![2, 2], vec![0, 1]), Rational::from(2u64));
    }

    #[test]
    fn exact_examples() {
        assert_eq!(eval_bags_exact(&[3, 2, 2], 2, Objective::Makespan, &b()).unwrap(), 4);
        assert_eq!(eval_bags_exact(&[3, 2, 2], 2, Objective::SantaClaus, &b()).unwrap(), 3);
        assert_eq!(eval_bags_exact(&[3, 2], 3, Objective::SantaClaus, &b()).unwrap(), 0);
        assert_eq!(eval_bags_exact(&[], 2, Objective::Makespan, &b()).unwrap(), 0);
    }

    #[test]
    fn exact_reports_exhausted_budget() {
        let tight = Budget {
            exact_nodes: 3,
            ..Budget::default()
        };
        let err = eval_bags_exact(&[10, 9, 8, 7, 6, 5, 4], 3, Objective::Makespan, &tight);
        assert!(matches!(err, Err(Error::Capacity { .. })));
    }

    #[test]
    fn list_examples() {
        assert_eq!(eval_bags_list(&[3, 2, 2], 2, Objective::Makespan, ListOrder::Lpt), 4);
        assert_eq!(eval_bags_list(&[4], 1, Objective::Makespan, ListOrder::Given), 4);
        assert_eq!(eval_bags_list(&[4], 1, Objective::SantaClaus, ListOrder::Lpt), 4);
        assert_eq!(eval_bags_list(&[2, 2, 2, 2], 2, Objective::SantaClaus, ListOrder::Given), 4);
    }

    #[test]
    fn water_level_examples() {
        assert_eq!(water_level(&[3, 0, 0], 4), 2);
        assert_eq!(water_level(&[3, 2], 0), 2);
        assert_eq!(water_level(&[0], 5), 5);
        assert_eq!(water_level(&[1, 1, 1], 3), 2);
    }

    #[test]
    fn expected_value_examples() {
        let inst = Instance::new(vec![3, 1], vec![1, 1]).unwrap();
        let bags = Bagging::new(vec![vec![0], vec![1]]);
        let v = expected_value(&bags, &inst, Objective::Makespan, Evaluator::Exact, &b()).unwrap();
        assert_eq!(v, Rational::new(7, 2));
        let inst = Instance::new(vec![1, 1, 1], vec![0, 0, 1]).unwrap();
        let bags = Bagging::singletons(3);
        let v = expected_value(&bags, &inst, Objective::SantaClaus, Evaluator::Exact, &b()).unwrap();
        assert_eq!(v, Rational::one());
        let inst = Instance::new(vec![4, 2, 5], vec![1, 0, 0]).unwrap();
        for obj in [Objective::Makespan, Objective::SantaClaus] {
            let v = expected_value(&bags, &inst, obj, Evaluator::Exact, &b()).unwrap();
            assert_eq!(v, Rational::from(11u64));
        }
    }

    proptest! {
        #[test]
        fn exact_matches_naive(sizes in proptest::collection::vec(0u64..12, 0..7), m in 1usize..5) {
            for obj in [Objective::Makespan, Objective::SantaClaus] {
                prop_assert_eq!(eval_bags_exact(&sizes, m, obj, &b()).unwrap(), naive(&sizes, m, obj));
            }
        }

        #[test]
        fn list_bounds_exact(sizes in proptest::collection::vec(1u64..20, 1..7), m in 1usize..5) {
            let ms = eval_bags_exact(&sizes, m, Objective::Makespan, &b()).unwrap();
            let sc = eval_bags_exact(&sizes, m, Objective::SantaClaus, &b()).unwrap();
            for order in [ListOrder::Given, ListOrder::Lpt] {
                prop_assert!(eval_bags_list(&sizes, m, Objective::Makespan, order) >= ms);
                prop_assert!(eval_bags_list(&sizes, m, Objective::SantaClaus, order) <= sc);
            }
        }

        #[test]
        fn one_machine_is_total(sizes in proptest::collection::vec(1u64..20, 1..7)) {
            let total: u64 = sizes.iter().sum();
            prop_assert_eq!(eval_bags_exact(&sizes, 1, Objective::Makespan, &b()).unwrap(), total);
            prop_assert_eq!(eval_bags_exact(&sizes, 1, Objective::SantaClaus, &b()).unwrap(), total);
        }

        #[test]
        fn nonincreasing_in_m(sizes in proptest::collection::vec(1u64..20, 1..7), m in 1usize..5) {
            for obj in [Objective::Makespan, Objective::SantaClaus] {
                let a = eval_bags_exact(&sizes, m, obj, &b()).unwrap();
                let c = eval_bags_exact(&sizes, m + 1, obj, &b()).unwrap();
                prop_assert!(c <= a);
            }
        }

        #[test]
        fn lower_bound_below_singletons(p in proptest::collection::vec(1u64..20, 1..7), m in 1usize..4) {
            let inst = Instance::new(p.clone(), vec![1; 3]).unwrap();
            let lb = machine_lower_bound(&inst, m).unwrap();
            let opt = eval_bags_exact(&p, m, Objective::Makespan, &b()).unwrap();
            prop_assert!(lb <= Rational::from(opt));
        }
    }
}
