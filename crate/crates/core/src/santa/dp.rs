use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::rational::Rational;

use super::config::{bounded_multisets, enumerate_configs, Config};
use super::intervals::{Estimate, InnerIntervalIndex};
use super::waterfill::{level_floor, waterfill_value};

/// A residual subproblem over levels 0..=k.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DpCell {
    pub k: usize,
    /// Bags already fixed at levels above k.
    pub large_bags: u32,
    /// |B_k| = Σ estimates.
    pub bag_count: u32,
    /// First scenario not yet accounted for.
    pub min_scenario: u32,
    /// S: deficit volume of higher bags still to be covered by jobs of level ≤ k.
    pub small_volume: u64,
    /// Part of S owed to B_{k+1}, which J_k jobs may not cover.
    pub adjacent_deficit: u64,
    /// s: bag count per estimate of level k.
    pub estimates: Vec<u32>,
    /// a: jobs per class of level k already placed in B_{k+1}.
    pub reserved: Vec<u32>,
}

/// Best choice for a cell; `profit` is Σ w_m·ALG(m) (divide by Σw for Σ q_m·ALG(m)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpSolution {
    pub profit: u128,
    /// Per estimate with s_e > 0, in estimate order: chosen configuration indices, nondecreasing.
    pub assignment: Vec<Vec<usize>>,
    pub max_scenario: u32,
    pub algs: Vec<(u32, u64)>,
    pub child: Option<DpCell>,
}

impl DpSolution {
    pub fn profit_rational(&self, total_weight: u64) -> Rational {
        Rational::new(self.profit, total_weight)
    }
}

/// How the small-volume field Ŝ ≥ S̄ of child cells is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChildSelection {
    /// S̄, and S_k + f for every leftover volume f the child level can leave
    /// behind: the least Ŝ under which the child absorbs exactly f.
    #[default]
    Tight,
    /// Every Ŝ ≥ S̄ that leaves T ≥ 0.
    Exhaustive,
}

/// A bag fixed by the DP, before small-job filling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedBag {
    pub level: usize,
    pub estimate: Estimate,
    pub jobs: Vec<usize>,
    pub content: u64,
}

struct Outcome {
    used: Vec<u16>,
    deficit: u64,
    choice: Vec<Vec<usize>>,
}

const ASSIGNMENT_CAP: usize = 2_000_000;

/// Memoized solver over [`DpCell`]s for one rounded inner instance.
pub struct DpSolver<'a> {
    index: &'a InnerIntervalIndex,
    weights: Vec<u64>,
    max_bags: u32,
    budget: &'a Budget,
    mode: ChildSelection,
    /// configs[k][e]: configurations of J_k ∪ J_{k−1} for estimate e of level k.
    configs: Vec<Vec<Vec<Config>>>,
    memo: HashMap<DpCell, Option<Rc<DpSolution>>>,
    alg_cache: HashMap<(Vec<u64>, u32, u64, u32), Option<u64>>,
    candidates: u64,
}

impl<'a> DpSolver<'a> {
    /// `weights[m-1]` is w_m for the inner instance's scenarios 1..=M.
    pub fn new(index: &'a InnerIntervalIndex, weights: &[u64], budget: &'a Budget, mode: ChildSelection) -> Self {
        let configs = (0..index.levels.len())
            .map(|k| {
                let (sizes, counts) = combined_classes(index, k);
                index.levels[k]
                    .estimates
                    .iter()
                    .map(|e| enumerate_configs(&sizes, &counts, e.max_content))
                    .collect()
            })
            .collect();
        DpSolver {
            index,
            weights: weights.to_vec(),
            max_bags: weights.len() as u32,
            budget,
            mode,
            configs,
            memo: HashMap::new(),
            alg_cache: HashMap::new(),
            candidates: 0,
        }
    }

    pub fn cell_count(&self) -> usize {
        self.memo.len()
    }

    pub fn candidate_count(&self) -> u64 {
        self.candidates
    }

    /// The root: every estimate multiset for the top level, no scenario handled yet.
    pub fn solve_top(&mut self) -> Result<Option<(DpCell, Rc<DpSolution>)>> {
        let top = self.index.top;
        let level = &self.index.levels[top];
        let mut best: Option<(DpCell, Rc<DpSolution>)> = None;
        for s in bounded_multisets(level.estimates.len(), self.max_bags) {
            let cell = DpCell {
                k: top,
                large_bags: 0,
                bag_count: s.iter().sum(),
                min_scenario: 1,
                small_volume: 0,
                adjacent_deficit: 0,
                estimates: s,
                reserved: vec![0; level.classes.len()],
            };
            if let Some(sol) = self.solve(&cell)? {
                if best.as_ref().is_none_or(|(_, b)| sol.profit > b.profit) {
                    best = Some((cell, sol));
                }
            }
        }
        Ok(best)
    }

    /// Memoized best solution of `cell`; `None` when no guess is feasible.
    pub fn solve(&mut self, cell: &DpCell) -> Result<Option<Rc<DpSolution>>> {
        if let Some(hit) = self.memo.get(cell) {
            return Ok(hit.clone());
        }
        if self.memo.len() >= self.budget.dp_cells {
            return Err(Error::capacity(
                "dp_solve",
                format!("memo table exceeds {} cells", self.budget.dp_cells),
            ));
        }
        let result = self.compute(cell)?.map(Rc::new);
        self.memo.insert(cell.clone(), result.clone());
        Ok(result)
    }

    fn compute(&mut self, cell: &DpCell) -> Result<Option<DpSolution>> {
        let index = self.index;
        let k = cell.k;
        let level = &index.levels[k];
        let nk = level.classes.len();
        let (sizes, counts) = combined_classes(index, k);
        let mut available = counts.clone();
        for (i, &r) in cell.reserved.iter().enumerate() {
            if r as u64 > available[i] as u64 {
                return Ok(None);
            }
            available[i] -= r as u16;
        }
        if cell.adjacent_deficit > cell.small_volume {
            return Err(Error::Internal("adjacent deficit exceeds small volume".into()));
        }
        let outcomes = self.assignments(k, &cell.estimates, &available)?;
        let own_targets = expand_targets(&level.estimates, &cell.estimates);
        let floor = level_floor(index.epsilon.inverse(), k);
        let mut best: Option<DpSolution> = None;
        let consider = |candidate: DpSolution, best: &mut Option<DpSolution>| {
            if best.as_ref().is_none_or(|b| candidate.profit > b.profit) {
                *best = Some(candidate);
            }
        };

        for outcome in outcomes {
            let leftover: u64 = (0..nk)
                .map(|i| (available[i] - outcome.used[i]) as u64 * sizes[i])
                .sum();
            // Unplaced J_k jobs can only be filler for bags two or more levels up.
            let far = cell.small_volume - cell.adjacent_deficit;
            if leftover > far {
                continue;
            }
            let carried = cell.small_volume - leftover + outcome.deficit;
            let lower_used: Vec<u32> = outcome.used[nk..].iter().map(|&u| u as u32).collect();
            let placed_lower: u64 = outcome.used[nk..]
                .iter()
                .zip(&sizes[nk..])
                .map(|(&u, &s)| u as u64 * s)
                .sum();

            if k == 0 {
                // Exactly M bags: with n > M an optimal bagging never uses fewer.
                if carried != 0 || cell.large_bags + cell.bag_count != self.max_bags {
                    continue;
                }
                let (prefix, max_ok) = self.scenario_profits(&own_targets, cell.large_bags, 0, cell.min_scenario, floor);
                if max_ok < self.max_bags {
                    continue;
                }
                self.candidates += 1;
                consider(
                    DpSolution {
                        profit: *prefix.last().expect("nonempty prefix"),
                        assignment: outcome.choice.clone(),
                        max_scenario: self.max_bags,
                        algs: self.algs_for(&own_targets, cell.large_bags, 0, cell.min_scenario, self.max_bags),
                        child: None,
                    },
                    &mut best,
                );
                continue;
            }

            let below = index.volume_through(k - 1);
            if placed_lower + carried > below {
                continue;
            }
            let lower_level = &index.levels[k - 1];
            let lower_leftovers = volume_sums(
                lower_level.classes.iter().zip(&lower_used).map(|(c, &u)| (c.size, c.jobs.len() as u32 - u)),
            );
            let room = self.max_bags - cell.large_bags - cell.bag_count;
            for shat in bounded_multisets(lower_level.estimates.len(), room) {
                let lower_targets = expand_targets(&lower_level.estimates, &shat);
                let target_sum: u64 = lower_targets.iter().sum();
                if placed_lower + carried + target_sum > below {
                    continue;
                }
                let max_small = below - placed_lower - target_sum;
                let small_choices: Vec<u64> = match self.mode {
                    ChildSelection::Tight => std::iter::once(carried)
                        .chain(
                            lower_leftovers
                                .iter()
                                .map(|f| outcome.deficit + f)
                                .filter(|&v| v > carried && v <= max_small),
                        )
                        .collect(),
                    ChildSelection::Exhaustive => (carried..=max_small).collect(),
                };
                let mut targets = own_targets.clone();
                targets.extend_from_slice(&lower_targets);
                for small in small_choices {
                    let dummy = below - placed_lower - small - target_sum;
                    let (prefix, max_ok) =
                        self.scenario_profits(&targets, cell.large_bags, dummy, cell.min_scenario, floor);
                    for m_max in (cell.min_scenario - 1)..=max_ok {
                        let child = DpCell {
                            k: k - 1,
                            large_bags: cell.large_bags + cell.bag_count,
                            bag_count: shat.iter().sum(),
                            min_scenario: m_max + 1,
                            small_volume: small,
                            adjacent_deficit: outcome.deficit,
                            estimates: shat.clone(),
                            reserved: lower_used.clone(),
                        };
                        let Some(child_solution) = self.solve(&child)? else {
                            continue;
                        };
                        self.candidates += 1;
                        let profit = prefix[(m_max + 1 - cell.min_scenario) as usize] + child_solution.profit;
                        if best.as_ref().is_none_or(|b| profit > b.profit) {
                            let algs = self.algs_for(&targets, cell.large_bags, dummy, cell.min_scenario, m_max);
                            consider(
                                DpSolution {
                                    profit,
                                    assignment: outcome.choice.clone(),
                                    max_scenario: m_max,
                                    algs,
                                    child: Some(child),
                                },
                                &mut best,
                            );
                        }
                    }
                }
            }
        }
        Ok(best)
    }

    /// Distinct (usage, deficit) outcomes of placing configurations into the
    /// cell's bags, first occurrence kept.
    fn assignments(&self, k: usize, estimates: &[u32], available: &[u16]) -> Result<Vec<Outcome>> {
        let groups: Vec<(usize, u32)> = estimates
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(e, &c)| (e, c))
            .collect();
        let level_estimates = &self.index.levels[k].estimates;
        let mut seen: HashMap<(Vec<u16>, u64), ()> = HashMap::new();
        let mut out = Vec::new();
        let mut visited = 0usize;

        struct Walk<'w> {
            groups: &'w [(usize, u32)],
            configs: &'w [Vec<Config>],
            estimates: &'w [Estimate],
        }

        type Visit<'v> = dyn FnMut(&[u16], u64, &[Vec<usize>]) -> Result<()> + 'v;

        // Each group keeps its own choice list; `go` opens a list when a group starts.
        fn start(
            w: &Walk,
            remaining: &mut Vec<u16>,
            visit: &mut Visit,
        ) -> Result<()> {
            fn open(
                w: &Walk,
                g: usize,
                remaining: &mut Vec<u16>,
                deficit: u64,
                choice: &mut Vec<Vec<usize>>,
                visit: &mut Visit,
            ) -> Result<()> {
                if g == w.groups.len() {
                    return visit(remaining, deficit, choice);
                }
                choice.push(Vec::new());
                let r = group(w, g, 0, 0, remaining, deficit, choice, visit);
                choice.pop();
                r
            }
            #[allow(clippy::too_many_arguments)]
            fn group(
                w: &Walk,
                g: usize,
                placed: u32,
                min_cfg: usize,
                remaining: &mut Vec<u16>,
                deficit: u64,
                choice: &mut Vec<Vec<usize>>,
                visit: &mut Visit,
            ) -> Result<()> {
                let (e, count) = w.groups[g];
                if placed == count {
                    return open(w, g + 1, remaining, deficit, choice, visit);
                }
                let target = w.estimates[e].target;
                for (ci, cfg) in w.configs[e].iter().enumerate().skip(min_cfg) {
                    if cfg.counts.iter().zip(remaining.iter()).any(|(&c, &r)| c > r) {
                        continue;
                    }
                    for (r, &c) in remaining.iter_mut().zip(&cfg.counts) {
                        *r -= c;
                    }
                    choice.last_mut().expect("group open").push(ci);
                    let d = deficit + target.saturating_sub(cfg.content);
                    let r = group(w, g, placed + 1, ci, remaining, d, choice, visit);
                    choice.last_mut().expect("group open").pop();
                    for (r, &c) in remaining.iter_mut().zip(&cfg.counts) {
                        *r += c;
                    }
                    r?;
                }
                Ok(())
            }
            open(w, 0, remaining, 0, &mut Vec::new(), visit)
        }

        let walk = Walk {
            groups: &groups,
            configs: &self.configs[k],
            estimates: level_estimates,
        };
        let mut remaining = available.to_vec();
        let mut visit = |rest: &[u16], deficit: u64, choice: &[Vec<usize>]| -> Result<()> {
            visited += 1;
            if visited > ASSIGNMENT_CAP {
                return Err(Error::capacity(
                    "dp_solve",
                    format!("more than {ASSIGNMENT_CAP} configuration assignments in one cell"),
                ));
            }
            let used: Vec<u16> = available.iter().zip(rest).map(|(&a, &r)| a - r).collect();
            if seen.insert((used.clone(), deficit), ()).is_none() {
                out.push(Outcome {
                    used,
                    deficit,
                    choice: choice.to_vec(),
                });
            }
            Ok(())
        };
        start(&walk, &mut remaining, &mut visit)?;
        Ok(out)
    }

    fn alg(&mut self, targets: &[u64], large: u32, dummy: u64, m: u32) -> Option<u64> {
        let mut key_targets = targets.to_vec();
        key_targets.sort_unstable();
        let key = (key_targets, large, dummy, m);
        if let Some(&v) = self.alg_cache.get(&key) {
            return v;
        }
        let v = waterfill_value(&key.0, large as usize, dummy, m as usize);
        self.alg_cache.insert(key, v);
        v
    }

    /// Prefix sums of w_m·ALG(m) from m_min; index i covers m_min..m_min+i−1.
    /// Stops before the first weighted scenario failing the floor.
    fn scenario_profits(
        &mut self,
        targets: &[u64],
        large: u32,
        dummy: u64,
        m_min: u32,
        floor: (u128, u128),
    ) -> (Vec<u128>, u32) {
        let mut prefix = vec![0u128];
        let mut m = m_min;
        while m <= self.max_bags {
            let w = self.weights[(m - 1) as usize];
            let gain = if w == 0 {
                0
            } else {
                match self.alg(targets, large, dummy, m) {
                    Some(v) if v as u128 * floor.1 >= floor.0 => w as u128 * v as u128,
                    _ => break,
                }
            };
            prefix.push(prefix.last().expect("nonempty") + gain);
            m += 1;
        }
        (prefix, m - 1)
    }

    fn algs_for(&mut self, targets: &[u64], large: u32, dummy: u64, m_min: u32, m_max: u32) -> Vec<(u32, u64)> {
        let mut out = Vec::new();
        for m in m_min..=m_max {
            if self.weights[(m - 1) as usize] > 0 {
                out.push((m, self.alg(targets, large, dummy, m).unwrap_or(0)));
            }
        }
        out
    }

    /// Materializes the bags chosen from `top` downwards; jobs of a class are taken in index order.
    pub fn reconstruct(&self, top: &DpCell) -> Result<Vec<PlannedBag>> {
        let index = self.index;
        let mut pools: Vec<Vec<VecDeque<usize>>> = index
            .levels
            .iter()
            .map(|l| l.classes.iter().map(|c| c.jobs.iter().copied().collect()).collect())
            .collect();
        let mut bags = Vec::new();
        let mut cell = Some(top.clone());
        while let Some(current) = cell {
            let solution = self
                .memo
                .get(&current)
                .and_then(|s| s.clone())
                .ok_or_else(|| Error::Internal(format!("cell {current:?} has no stored solution")))?;
            let k = current.k;
            let nk = index.levels[k].classes.len();
            let groups = current.estimates.iter().enumerate().filter(|(_, &c)| c > 0);
            for ((e, _), chosen) in groups.zip(&solution.assignment) {
                let estimate = index.levels[k].estimates[e].clone();
                for &ci in chosen {
                    let config = &self.configs[k][e][ci];
                    let mut jobs = Vec::new();
                    for (i, &count) in config.counts.iter().enumerate() {
                        let pool = if i < nk { &mut pools[k][i] } else { &mut pools[k - 1][i - nk] };
                        for _ in 0..count {
                            jobs.push(pool.pop_front().ok_or_else(|| {
                                Error::Internal("configuration uses more jobs than available".into())
                            })?);
                        }
                    }
                    bags.push(PlannedBag {
                        level: k,
                        estimate: estimate.clone(),
                        jobs,
                        content: config.content,
                    });
                }
            }
            cell = solution.child.clone();
        }
        Ok(bags)
    }
}

/// Class sizes and counts of J_k followed by J_{k−1}.
fn combined_classes(index: &InnerIntervalIndex, k: usize) -> (Vec<u64>, Vec<u16>) {
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

/// Distinct Σ c_i·size_i with 0 ≤ c_i ≤ count_i, ascending.
fn volume_sums(classes: impl Iterator<Item = (u64, u32)>) -> Vec<u64> {
    let mut sums = std::collections::BTreeSet::from([0u64]);
    for (size, count) in classes {
        let base: Vec<u64> = sums.iter().copied().collect();
        for c in 1..=count as u64 {
            sums.extend(base.iter().map(|v| v + c * size));
        }
    }
    sums.into_iter().collect()
}

fn expand_targets(estimates: &[Estimate], counts: &[u32]) -> Vec<u64> {
    estimates
        .iter()
        .zip(counts)
        .flat_map(|(e, &c)| std::iter::repeat_n(e.target, c as usize))
        .collect()
}
