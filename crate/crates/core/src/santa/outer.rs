use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::budget::Budget;
use crate::error::Result;
use crate::eval::eval_bags_exact;
use crate::model::{Bagging, Instance, Objective};
use crate::rational::{Epsilon, Rational};

use super::scale::{build_scale_intervals, prune_headgap_jobs, ScaleIntervalFamily};
use super::{solve_inner, InnerOutcome, SantaOptions};

/// Result of the outer DP with the statistics of every inner solve it ran.
#[derive(Debug, Clone)]
pub struct OuterOutcome {
    pub bagging: Bagging,
    pub value: Rational,
    pub best_offset: u32,
    pub inner: Vec<Rc<InnerOutcome>>,
}

#[derive(Clone)]
struct Partial {
    bags: Vec<Vec<usize>>,
    profit: u128,
}

struct InnerCache<'a> {
    instance: &'a Instance,
    epsilon: Epsilon,
    budget: &'a Budget,
    options: SantaOptions,
    solved: HashMap<(Vec<usize>, Vec<u64>), Rc<InnerOutcome>>,
    order: Vec<Rc<InnerOutcome>>,
}

impl InnerCache<'_> {
    /// Bags (global job indices) for `jobs` into `bag_count` bags with
    /// weights w̃_1..w̃_len, zero-padded to `bag_count`.
    fn bags(&mut self, jobs: &[usize], bag_count: usize, weights: &[u64]) -> Result<Vec<Vec<usize>>> {
        let p = self.instance.processing_times();
        let sizes: Vec<u64> = jobs.iter().map(|&j| p[j]).collect();
        if weights.iter().all(|&w| w == 0) {
            let lpt = Bagging::lpt(&sizes, bag_count);
            return Ok(lpt.bags().iter().map(|b| b.iter().map(|&i| jobs[i]).collect()).collect());
        }
        let mut padded = weights.to_vec();
        padded.resize(bag_count, 0);
        let key = (jobs.to_vec(), padded.clone());
        let outcome = match self.solved.get(&key) {
            Some(hit) => hit.clone(),
            None => {
                let sub = Instance::new(sizes, padded)?;
                let solved = Rc::new(solve_inner(
                    &sub,
                    self.epsilon,
                    self.instance.job_count(),
                    self.budget,
                    self.options,
                )?);
                self.order.push(solved.clone());
                self.solved.insert(key, solved.clone());
                solved
            }
        };
        Ok(outcome
            .bagging
            .bags()
            .iter()
            .map(|b| b.iter().map(|&i| jobs[i]).collect())
            .collect())
    }
}

/// Σ_{m ≤ m_max} w_m·Opt(bags, m).
fn partial_profit(instance: &Instance, bags: &[Vec<usize>], m_max: usize, budget: &Budget) -> Result<u128> {
    let p = instance.processing_times();
    let sizes: Vec<u64> = bags.iter().map(|b| b.iter().map(|&j| p[j]).sum()).collect();
    let mut total = 0u128;
    for m in 1..=m_max {
        let w = instance.weight(m);
        if w > 0 {
            total += w as u128 * eval_bags_exact(&sizes, m, Objective::SantaClaus, budget)? as u128;
        }
    }
    Ok(total)
}

/// Cells C[k, m_max, b] over the nonempty levels from the top down; level k
/// serves scenarios m_max(k+1)+1..=m_max(k) with b(k) − b(k+1) new bags.
fn solve_offset(
    instance: &Instance,
    family: &ScaleIntervalFamily,
    cache: &mut InnerCache,
    budget: &Budget,
) -> Result<Bagging> {
    let big_m = instance.max_machines();
    let pruning = prune_headgap_jobs(family);
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &j in &pruning.kept {
        groups.entry(family.placements[j].k).or_default().push(j);
    }
    let weights = instance.machine_weights();
    let mut cells: Option<HashMap<(usize, usize), Partial>> = None;
    for (&k, jobs) in groups.iter().rev() {
        let mut next: HashMap<(usize, usize), Partial> = HashMap::new();
        for b in 0..=big_m {
            for m_max in 0..=b {
                let mut best: Option<Partial> = None;
                let mut consider = |bags: Vec<Vec<usize>>| -> Result<()> {
                    let profit = partial_profit(instance, &bags, m_max, budget)?;
                    if best.as_ref().is_none_or(|c| profit > c.profit) {
                        best = Some(Partial { bags, profit });
                    }
                    Ok(())
                };
                match &cells {
                    None => {
                        if b == 0 {
                            continue;
                        }
                        let bags = cache.bags(jobs, b, &weights[..m_max]).map_err(|e| e.in_stage(&format!("outer_dp a={} k={k}", family.offset)))?;
                        consider(bags)?;
                    }
                    Some(prev) => {
                        for b1 in 0..=b {
                            for m1 in 0..=m_max.min(b1) {
                                let Some(upper) = prev.get(&(m1, b1)) else {
                                    continue;
                                };
                                let (b2, m2) = (b - b1, m_max - m1);
                                if m2 > b2 {
                                    continue;
                                }
                                let mut bags = upper.bags.clone();
                                if b2 == 0 {
                                    match bags.last_mut() {
                                        Some(last) => last.extend_from_slice(jobs),
                                        None => continue,
                                    }
                                } else {
                                    let lower = cache
                                        .bags(jobs, b2, &weights[m1..m1 + m2])
                                        .map_err(|e| e.in_stage(&format!("outer_dp a={} k={k}", family.offset)))?;
                                    bags.extend(lower);
                                }
                                consider(bags)?;
                            }
                        }
                    }
                }
                if let Some(partial) = best {
                    next.insert((m_max, b), partial);
                }
            }
        }
        cells = Some(next);
    }

    let mut bags = match cells.as_ref().and_then(|c| c.get(&(big_m, big_m))) {
        Some(partial) => partial.bags.clone(),
        None => Vec::new(),
    };
    if bags.is_empty() {
        // Every job sat in a head gap; bag them without the DP.
        let p = instance.processing_times();
        let sizes: Vec<u64> = pruning.removed.iter().map(|&j| p[j]).collect();
        bags = Bagging::lpt(&sizes, big_m)
            .bags()
            .iter()
            .map(|b| b.iter().map(|&i| pruning.removed[i]).collect())
            .collect();
    } else if let Some(last) = bags.last_mut() {
        last.extend_from_slice(&pruning.removed);
    }
    Ok(Bagging::new(bags))
}

/// Best bagging over all 1/ε + 4 offsets, compared by exact expected value.
pub fn outer_dp(instance: &Instance, epsilon: Epsilon, budget: &Budget, options: SantaOptions) -> Result<OuterOutcome> {
    let mut cache = InnerCache {
        instance,
        epsilon,
        budget,
        options,
        solved: HashMap::new(),
        order: Vec::new(),
    };
    let mut best: Option<(Bagging, Rational, u32)> = None;
    for a in 0..ScaleIntervalFamily::offset_count(epsilon) {
        let family = build_scale_intervals(instance, epsilon, a);
        let bagging = solve_offset(instance, &family, &mut cache, budget)?;
        let value = super::santa_value(&bagging, instance, budget)?;
        if best.as_ref().is_none_or(|(_, v, _)| value > *v) {
            best = Some((bagging, value, a));
        }
    }
    let (bagging, value, best_offset) = best.expect("at least one offset");
    Ok(OuterOutcome {
        bagging,
        value,
        best_offset,
        inner: cache.order,
    })
}
