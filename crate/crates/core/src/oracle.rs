use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::eval::{eval_bags_exact, expected_value_of_sizes, Evaluator};
use crate::model::{Bagging, Instance, Objective};
use crate::rational::Rational;

/// Restricted-growth strings over n positions with at most `max_blocks` distinct values.
#[derive(Debug, Clone)]
pub struct PartitionCursor {
    labels: Vec<usize>,
    max_blocks: usize,
    started: bool,
    done: bool,
}

impl PartitionCursor {
    pub fn new(n: usize, max_blocks: usize) -> Self {
        PartitionCursor {
            labels: vec![0; n],
            max_blocks,
            started: false,
            done: n > 0 && max_blocks == 0,
        }
    }

    /// Current block label per position.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    fn advance(&mut self) -> bool {
        let n = self.labels.len();
        let mut prefix_max = vec![0usize; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(self.labels[i - 1]);
        }
        for i in (1..n).rev() {
            let limit = (prefix_max[i] + 1).min(self.max_blocks - 1);
            if self.labels[i] < limit {
                self.labels[i] += 1;
                for l in &mut self.labels[i + 1..] {
                    *l = 0;
                }
                return true;
            }
        }
        false
    }

    fn to_bagging(&self) -> Bagging {
        let blocks = self.labels.iter().copied().max().map_or(0, |b| b + 1);
        let mut bags = vec![Vec::new(); blocks];
        for (j, &b) in self.labels.iter().enumerate() {
            bags[b].push(j);
        }
        Bagging::new(bags)
    }
}

impl Iterator for PartitionCursor {
    type Item = Bagging;

    fn next(&mut self) -> Option<Bagging> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(self.to_bagging())
    }
}

/// Every partition of the jobs into at most M nonempty bags, once each.
pub fn enumerate_baggings(instance: &Instance, budget: &Budget) -> Result<PartitionCursor> {
    let n = instance.job_count();
    if n > budget.enumeration_cap {
        return Err(Error::capacity(
            "enumerate_baggings",
            format!("n={n} exceeds enumeration cap {}", budget.enumeration_cap),
        ));
    }
    Ok(PartitionCursor::new(n, instance.max_machines()))
}

fn improves(objective: Objective, candidate: &Rational, incumbent: &Rational) -> bool {
    match objective {
        Objective::Makespan => candidate < incumbent,
        Objective::SantaClaus => candidate > incumbent,
    }
}

/// Exact optimum by exhaustive enumeration; the first optimum in enumeration order wins.
pub fn optimal_bagging(
    instance: &Instance,
    objective: Objective,
    budget: &Budget,
) -> Result<(Bagging, Rational)> {
    let (mut optima, value) = optimal_baggings(instance, objective, budget)?;
    Ok((optima.swap_remove(0), value))
}

/// All optimal baggings in enumeration order, with the optimum.
pub fn optimal_baggings(
    instance: &Instance,
    objective: Objective,
    budget: &Budget,
) -> Result<(Vec<Bagging>, Rational)> {
    let mut best: Option<Rational> = None;
    let mut optima = Vec::new();
    for bagging in enumerate_baggings(instance, budget)? {
        let sizes = bagging.bag_sizes(instance);
        let value = expected_value_of_sizes(&sizes, instance, objective, Evaluator::Exact, budget)?;
        match &best {
            Some(b) if *b == value => optima.push(bagging),
            Some(b) if !improves(objective, &value, b) => {}
            _ => {
                best = Some(value);
                optima = vec![bagging];
            }
        }
    }
    let value = best.ok_or_else(|| Error::Internal("no bagging enumerated".into()))?;
    Ok((optima, value))
}

/// A packing: bin per item plus the capacity left in each bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingWitness {
    pub bin_of_item: Vec<usize>,
    pub residual: Vec<u64>,
}

/// Exact variable-size bin packing by branch and bound.
pub fn bin_packing_feasible(
    item_sizes: &[u64],
    bin_capacities: &[u64],
    budget: &Budget,
) -> Result<Option<PackingWitness>> {
    let mut items: Vec<usize> = (0..item_sizes.len()).collect();
    items.sort_by(|&a, &b| item_sizes[b].cmp(&item_sizes[a]).then(a.cmp(&b)));
    let mut bins: Vec<usize> = (0..bin_capacities.len()).collect();
    bins.sort_by(|&a, &b| bin_capacities[b].cmp(&bin_capacities[a]).then(a.cmp(&b)));

    let total_items: u128 = item_sizes.iter().map(|&s| s as u128).sum();
    let total_bins: u128 = bin_capacities.iter().map(|&c| c as u128).sum();
    if total_items > total_bins {
        return Ok(None);
    }
    let largest_bin = bins.first().map_or(0, |&b| bin_capacities[b]);
    if items.first().is_some_and(|&i| item_sizes[i] > largest_bin) {
        return Ok(None);
    }

    struct Packer {
        sizes: Vec<u64>,
        residual: Vec<u64>,
        choice: Vec<usize>,
        slack: u128,
        nodes: u64,
        limit: u64,
    }

    fn dfs(p: &mut Packer, i: usize) -> Result<bool> {
        p.nodes += 1;
        if p.nodes > p.limit {
            return Err(Error::capacity(
                "bin_packing_feasible",
                format!("node budget {} exhausted", p.limit),
            ));
        }
        if i == p.sizes.len() {
            return Ok(true);
        }
        let item = p.sizes[i];
        for b in 0..p.residual.len() {
            let r = p.residual[b];
            if r < item || p.residual[..b].contains(&r) {
                continue;
            }
            // Space left below the smallest remaining item is wasted for good.
            let waste = if i + 1 < p.sizes.len() && r - item < p.sizes[p.sizes.len() - 1] {
                (r - item) as u128
            } else {
                0
            };
            if waste > p.slack {
                continue;
            }
            p.slack -= waste;
            p.residual[b] -= item;
            p.choice[i] = b;
            if dfs(p, i + 1)? {
                return Ok(true);
            }
            p.residual[b] += item;
            p.slack += waste;
        }
        Ok(false)
    }

    let mut packer = Packer {
        sizes: items.iter().map(|&i| item_sizes[i]).collect(),
        residual: bins.iter().map(|&b| bin_capacities[b]).collect(),
        choice: vec![0; items.len()],
        slack: total_bins - total_items,
        nodes: 0,
        limit: budget.packing_nodes,
    };
    if !dfs(&mut packer, 0)? {
        return Ok(None);
    }
    let mut bin_of_item = vec![0; item_sizes.len()];
    for (pos, &item) in items.iter().enumerate() {
        bin_of_item[item] = bins[packer.choice[pos]];
    }
    let mut residual = vec![0; bin_capacities.len()];
    for (pos, &bin) in bins.iter().enumerate() {
        residual[bin] = packer.residual[pos];
    }
    Ok(Some(PackingWitness {
        bin_of_item,
        residual,
    }))
}

/// Opt(J,m): jobs assigned to machines directly, without bags.
pub fn optimal_value_direct(
    instance: &Instance,
    m: usize,
    objective: Objective,
    budget: &Budget,
) -> Result<u64> {
    eval_bags_exact(instance.processing_times(), m, objective, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst(p: Vec<u64>, w: Vec<u64>) -> Instance {
        Instance::new(p, w).unwrap()
    }

    fn b() -> Budget {
        Budget::default()
    }

    fn stirling2(n: usize, k: usize) -> u64 {
        match (n, k) {
            (0, 0) => 1,
            (0, _) | (_, 0) => 0,
            _ => k as u64 * stirling2(n - 1, k) + stirling2(n - 1, k - 1),
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_baggings(&inst(vec![1; 3], vec![1; 3]), &b()).unwrap().count(), 5);
        assert_eq!(enumerate_baggings(&inst(vec![1; 3], vec![1]), &b()).unwrap().count(), 1);
        assert_eq!(enumerate_baggings(&inst(vec![1; 2], vec![1; 2]), &b()).unwrap().count(), 2);
        for n in 1..=7 {
            for m in 1..=4 {
                let expected: u64 = (1..=n.min(m)).map(|k| stirling2(n, k)).sum();
                let got = PartitionCursor::new(n, m).count() as u64;
                assert_eq!(got, expected, "n={n} M={m}");
            }
        }
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let all: Vec<Bagging> = PartitionCursor::new(5, 3).collect();
        let unique: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(all.len(), unique.len());
        let instance = inst(vec![1; 5], vec![1; 3]);
        assert!(all.iter().all(|bg| bg.validate(&instance).is_ok()));
    }

    #[test]
    fn enumeration_cap() {
        let big = inst(vec![1; 11], vec![1]);
        assert!(matches!(enumerate_baggings(&big, &b()), Err(Error::Capacity { .. })));
    }

    #[test]
    fn optimal_bagging_examples() {
        let (bags, v) = optimal_bagging(&inst(vec![3, 1], vec![1, 1]), Objective::Makespan, &b()).unwrap();
        assert_eq!(v, Rational::new(7, 2));
        assert_eq!(bags.bags(), &[vec![0], vec![1]]);

        let four = inst(vec![1, 1, 1, 1], vec![0, 1]);
        let (bags, v) = optimal_bagging(&four, Objective::SantaClaus, &b()).unwrap();
        assert_eq!(v, Rational::from(2u64));
        let mut sizes = bags.bag_sizes(&four);
        sizes.sort();
        assert_eq!(sizes, vec![2, 2]);
        assert_eq!(enumerate_baggings(&four, &b()).unwrap().count(), 8);

        let trivial = inst(vec![5, 2, 7], vec![1, 2, 3]);
        let (bags, _) = optimal_bagging(&trivial, Objective::SantaClaus, &b()).unwrap();
        assert_eq!(bags, Bagging::singletons(3));
    }

    #[test]
    fn packing_examples() {
        let w = bin_packing_feasible(&[4, 4], &[8], &b()).unwrap().unwrap();
        assert_eq!(w.bin_of_item, vec![0, 0]);
        assert_eq!(w.residual, vec![0]);
        assert!(bin_packing_feasible(&[10], &[6, 6], &b()).unwrap().is_none());
        let w = bin_packing_feasible(&[3, 3, 3], &[6, 3], &b()).unwrap().unwrap();
        assert_eq!(w.bin_of_item, vec![0, 0, 1]);
        assert!(bin_packing_feasible(&[], &[], &b()).unwrap().is_some());
    }

    #[test]
    fn direct_examples() {
        let i = inst(vec![3, 1], vec![1, 1]);
        assert_eq!(optimal_value_direct(&i, 2, Objective::Makespan, &b()).unwrap(), 3);
        for obj in [Objective::Makespan, Objective::SantaClaus] {
            assert_eq!(optimal_value_direct(&i, 1, obj, &b()).unwrap(), 4);
        }
        let i = inst(vec![2, 2, 2], vec![1, 1]);
        assert_eq!(optimal_value_direct(&i, 2, Objective::SantaClaus, &b()).unwrap(), 2);
    }

    fn naive_packable(items: &[u64], bins: &[u64]) -> bool {
        fn go(i: usize, items: &[u64], res: &mut Vec<u64>) -> bool {
            if i == items.len() {
                return true;
            }
            for b in 0..res.len() {
                if res[b] >= items[i] {
                    res[b] -= items[i];
                    if go(i + 1, items, res) {
                        return true;
                    }
                    res[b] += items[i];
                }
            }
            false
        }
        go(0, items, &mut bins.to_vec())
    }

    proptest! {
        #[test]
        fn packing_agrees_with_naive(
            items in proptest::collection::vec(1u64..10, 0..=8),
            bins in proptest::collection::vec(0u64..20, 0..5),
        ) {
            let got = bin_packing_feasible(&items, &bins, &b()).unwrap();
            prop_assert_eq!(got.is_some(), naive_packable(&items, &bins));
            if let Some(w) = got {
                let mut load = vec![0u64; bins.len()];
                for (i, &bin) in w.bin_of_item.iter().enumerate() {
                    load[bin] += items[i];
                }
                for (k, &cap) in bins.iter().enumerate() {
                    prop_assert!(load[k] <= cap);
                    prop_assert_eq!(w.residual[k], cap - load[k]);
                }
            }
        }

        #[test]
        fn bags_only_constrain(p in proptest::collection::vec(1u64..9, 1..6), m in 1usize..4) {
            let instance = inst(p.clone(), vec![1; 3]);
            let direct_ms = optimal_value_direct(&instance, m, Objective::Makespan, &b()).unwrap();
            let direct_sc = optimal_value_direct(&instance, m, Objective::SantaClaus, &b()).unwrap();
            for bagging in enumerate_baggings(&instance, &b()).unwrap() {
                let sizes = bagging.bag_sizes(&instance);
                prop_assert!(eval_bags_exact(&sizes, m, Objective::Makespan, &b()).unwrap() >= direct_ms);
                prop_assert!(eval_bags_exact(&sizes, m, Objective::SantaClaus, &b()).unwrap() <= direct_sc);
            }
        }
    }
}
