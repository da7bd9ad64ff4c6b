use crate::rational::{Epsilon, Rational};

/// The k with p ∈ [(1/ε)^{3k}, (1/ε)^{3k+3}); p ≥ 1.
pub fn interval_index(p: &Rational, epsilon: Epsilon) -> usize {
    let step = Rational::from(epsilon.inverse() as u64).pow(3);
    let mut k = 0;
    let mut upper = step.clone();
    while upper <= *p {
        k += 1;
        upper = upper * &step;
    }
    k
}

/// A bag size estimate ℓ: target ⌈(1+ε)^ℓ⌉ and the explicit content limit below (1+ε)^{ℓ+1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Estimate {
    pub ell: i64,
    pub target: u64,
    pub max_content: u64,
}

/// Jobs of one size inside a level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobClass {
    pub size: u64,
    pub jobs: Vec<usize>,
}

/// One interval I_k with its jobs J_k and estimates L_k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub k: usize,
    /// (1/ε)^{3k}.
    pub lower: u128,
    pub classes: Vec<JobClass>,
    pub estimates: Vec<Estimate>,
    pub volume: u64,
}

impl Level {
    pub fn job_count(&self) -> usize {
        self.classes.iter().map(|c| c.jobs.len()).sum()
    }
}

/// Jobs and size estimates grouped by the intervals I_0..I_K, K the index of Σp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerIntervalIndex {
    pub epsilon: Epsilon,
    pub top: usize,
    pub levels: Vec<Level>,
    pub level_of_job: Vec<usize>,
    pub sizes: Vec<u64>,
}

impl InnerIntervalIndex {
    /// Estimates with targets above Σp are dropped: no bag can reach them.
    pub fn new(sizes: &[u64], epsilon: Epsilon) -> Self {
        let total: u64 = sizes.iter().sum();
        let top = interval_index(&Rational::from(total), epsilon);
        let step = (epsilon.inverse() as u128).pow(3);
        let mut levels: Vec<Level> = (0..=top)
            .map(|k| Level {
                k,
                lower: step.pow(k as u32),
                classes: Vec::new(),
                estimates: Vec::new(),
                volume: 0,
            })
            .collect();
        let mut level_of_job = Vec::with_capacity(sizes.len());
        for (j, &p) in sizes.iter().enumerate() {
            let k = interval_index(&Rational::from(p), epsilon);
            level_of_job.push(k);
            let level = &mut levels[k];
            level.volume += p;
            match level.classes.iter_mut().find(|c| c.size == p) {
                Some(class) => class.jobs.push(j),
                None => level.classes.push(JobClass { size: p, jobs: vec![j] }),
            }
        }
        for level in &mut levels {
            level.classes.sort_by_key(|c| c.size);
        }
        let g = epsilon.growth();
        let mut power = Rational::one();
        for ell in 0i64.. {
            let target = power.ceil_u64().unwrap_or(u64::MAX);
            if target > total {
                break;
            }
            let next = &power * &g;
            let k = interval_index(&Rational::from(target), epsilon);
            levels[k].estimates.push(Estimate {
                ell,
                target,
                max_content: next.ceil_u64().unwrap_or(u64::MAX) - 1,
            });
            power = next;
        }
        InnerIntervalIndex {
            epsilon,
            top,
            levels,
            level_of_job,
            sizes: sizes.to_vec(),
        }
    }

    /// Σ volume of levels 0..=k.
    pub fn volume_through(&self, k: usize) -> u64 {
        self.levels[..=k].iter().map(|l| l.volume).sum()
    }
}
