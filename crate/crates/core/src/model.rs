use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Which machine-load statistic is optimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Minimize the maximum machine load.
    Makespan,
    /// Maximize the minimum machine load.
    SantaClaus,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Makespan => "makespan",
            Objective::SantaClaus => "santa",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "makespan" => Ok(Objective::Makespan),
            "santa" | "santa-claus" => Ok(Objective::SantaClaus),
            _ => Err(Error::validation("objective", format!("unknown objective {s:?}"))),
        }
    }
}

/// Jobs plus a distribution over the machine count 1..=M given by integer weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instance {
    processing_times: Vec<u64>,
    machine_weights: Vec<u64>,
}

impl Instance {
    /// Builds a validated instance; M is the length of `machine_weights`.
    pub fn new(processing_times: Vec<u64>, machine_weights: Vec<u64>) -> Result<Self> {
        if processing_times.is_empty() {
            return Err(Error::validation("processing_times", "must be nonempty"));
        }
        if let Some(j) = processing_times.iter().position(|&p| p == 0) {
            return Err(Error::validation(
                "processing_times",
                format!("entry {j} must be a positive integer"),
            ));
        }
        if machine_weights.is_empty() {
            return Err(Error::validation("machine_weights", "must be nonempty (M >= 1)"));
        }
        if machine_weights.iter().all(|&w| w == 0) {
            return Err(Error::validation("machine_weights", "at least one weight must be positive"));
        }
        processing_times
            .iter()
            .try_fold(0u64, |acc, &p| acc.checked_add(p))
            .ok_or_else(|| Error::validation("processing_times", "total size overflows u64"))?;
        machine_weights
            .iter()
            .try_fold(0u64, |acc, &w| acc.checked_add(w))
            .ok_or_else(|| Error::validation("machine_weights", "total weight overflows u64"))?;
        Ok(Instance {
            processing_times,
            machine_weights,
        })
    }

    pub fn processing_times(&self) -> &[u64] {
        &self.processing_times
    }

    pub fn machine_weights(&self) -> &[u64] {
        &self.machine_weights
    }

    pub fn job_count(&self) -> usize {
        self.processing_times.len()
    }

    /// The maximum machine count M.
    pub fn max_machines(&self) -> usize {
        self.machine_weights.len()
    }

    pub fn total_size(&self) -> u64 {
        self.processing_times.iter().sum()
    }

    pub fn max_size(&self) -> u64 {
        self.processing_times.iter().copied().max().unwrap_or(0)
    }

    pub fn min_size(&self) -> u64 {
        self.processing_times.iter().copied().min().unwrap_or(0)
    }

    pub fn weight(&self, m: usize) -> u64 {
        self.machine_weights[m - 1]
    }

    pub fn total_weight(&self) -> u64 {
        self.machine_weights.iter().sum()
    }

    /// q_m = w_m / Σw for 1 ≤ m ≤ M.
    pub fn probability(&self, m: usize) -> Rational {
        Rational::new(self.weight(m), self.total_weight())
    }

    /// Scenarios with positive weight, ascending.
    pub fn active_scenarios(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.max_machines()).filter(move |&m| self.weight(m) > 0)
    }

    pub fn check_scenario(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.max_machines() {
            return Err(Error::Domain(format!(
                "scenario m={m} outside 1..={}",
                self.max_machines()
            )));
        }
        Ok(())
    }

    /// Same weights, different jobs.
    pub fn with_processing_times(&self, processing_times: Vec<u64>) -> Result<Self> {
        Instance::new(processing_times, self.machine_weights.clone())
    }
}

/// A partition of the job indices into at most M nonempty bags.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bagging {
    bags: Vec<Vec<usize>>,
}

impl Bagging {
    /// Canonical form: empty bags dropped, jobs ascending within a bag, bags ordered by first job.
    pub fn new(bags: Vec<Vec<usize>>) -> Self {
        let mut bags: Vec<Vec<usize>> = bags
            .into_iter()
            .filter(|b| !b.is_empty())
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        bags.sort();
        Bagging { bags }
    }

    /// Every job in its own bag.
    pub fn singletons(n: usize) -> Self {
        Bagging::new((0..n).map(|j| vec![j]).collect())
    }

    /// Jobs in nonincreasing size (ties by index) each go to the currently lightest of `bag_count` bags.
    pub fn lpt(sizes: &[u64], bag_count: usize) -> Self {
        let mut order: Vec<usize> = (0..sizes.len()).collect();
        order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
        let count = bag_count.max(1);
        let mut bags = vec![Vec::new(); count];
        let mut loads = vec![0u64; count];
        for j in order {
            let target = (0..count).min_by_key(|&i| (loads[i], i)).expect("at least one bag");
            bags[target].push(j);
            loads[target] += sizes[j];
        }
        Bagging::new(bags)
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn bag_count(&self) -> usize {
        self.bags.len()
    }

    pub fn bag_sizes(&self, instance: &Instance) -> Vec<u64> {
        let p = instance.processing_times();
        self.bags
            .iter()
            .map(|b| b.iter().map(|&j| p[j]).sum())
            .collect()
    }

    /// Checks the partition and bag-count invariants against `instance`.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        let n = instance.job_count();
        if self.bags.len() > instance.max_machines() {
            return Err(Error::validation(
                "bagging",
                format!("{} bags exceed M={}", self.bags.len(), instance.max_machines()),
            ));
        }
        let mut seen = vec![false; n];
        for bag in &self.bags {
            for &j in bag {
                if j >= n {
                    return Err(Error::validation("bagging", format!("job {j} out of range")));
                }
                if std::mem::replace(&mut seen[j], true) {
                    return Err(Error::validation("bagging", format!("job {j} appears twice")));
                }
            }
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(Error::validation("bagging", format!("job {j} is unassigned")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_validation() {
        assert!(Instance::new(vec![], vec![1]).is_err());
        assert!(matches!(
            Instance::new(vec![0], vec![1]),
            Err(Error::Validation { ref field, .. }) if field == "processing_times"
        ));
        assert!(matches!(
            Instance::new(vec![1], vec![0, 0]),
            Err(Error::Validation { ref field, .. }) if field == "machine_weights"
        ));
        let inst = Instance::new(vec![3, 1], vec![1, 3]).unwrap();
        assert_eq!(inst.max_machines(), 2);
        assert_eq!(inst.probability(2), Rational::new(3, 4));
        let total: Rational = (1..=2).map(|m| inst.probability(m)).sum();
        assert_eq!(total, Rational::one());
    }

    #[test]
    fn bagging_canonical_and_validation() {
        let b = Bagging::new(vec![vec![2, 0], vec![], vec![1]]);
        assert_eq!(b.bags(), &[vec![0, 2], vec![1]]);
        let inst = Instance::new(vec![1, 2, 3], vec![1, 1]).unwrap();
        assert!(b.validate(&inst).is_ok());
        assert_eq!(b.bag_sizes(&inst), vec![4, 2]);
        assert!(Bagging::new(vec![vec![0], vec![1]]).validate(&inst).is_err());
        assert!(Bagging::new(vec![vec![0], vec![1], vec![2]]).validate(&inst).is_err());
        assert!(Bagging::new(vec![vec![0, 1, 2, 2]]).validate(&inst).is_err());
    }

    #[test]
    fn lpt_bagging() {
        let b = Bagging::lpt(&[5, 4, 3, 3, 1], 2);
        assert_eq!(b.bags(), &[vec![0, 3], vec![1, 2, 4]]);
        assert_eq!(Bagging::lpt(&[2, 2], 3).bag_count(), 2);
    }
}
