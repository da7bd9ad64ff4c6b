use std::path::PathBuf;
use std::time::{Duration, Instant};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::eval::{scenario_values, Evaluator};
use crate::makespan::solve_makespan;
use crate::model::{Bagging, Instance, Objective};
use crate::oracle::optimal_bagging;
use crate::rational::{Epsilon, Rational};
use crate::santa::solve_santa;

use super::gen::{generate_instance, GeneratorSpec};
use super::io::load_instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Ptas,
    Oracle,
    LptBags,
}

impl std::fmt::Display for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Solver::Ptas => "ptas",
            Solver::Oracle => "oracle",
            Solver::LptBags => "lpt-bags",
        })
    }
}

impl std::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ptas" => Ok(Solver::Ptas),
            "oracle" => Ok(Solver::Oracle),
            "lpt-bags" => Ok(Solver::LptBags),
            other => Err(Error::validation("solver", format!("unknown solver {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::validation("format", format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceSource {
    File(PathBuf),
    Generator(GeneratorSpec),
    Inline(Instance),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub objective: Objective,
    pub epsilon: Epsilon,
    pub solver: Solver,
    pub source: InstanceSource,
    pub seed: u64,
    pub with_oracle: bool,
    pub max_jobs: Option<usize>,
    pub max_machines: Option<usize>,
    pub budget: Budget,
    pub format: Format,
}

impl ExperimentConfig {
    pub fn new(objective: Objective, epsilon: Epsilon, source: InstanceSource) -> Self {
        ExperimentConfig {
            objective,
            epsilon,
            solver: Solver::Ptas,
            source,
            seed: 0,
            with_oracle: false,
            max_jobs: None,
            max_machines: None,
            budget: Budget::default(),
            format: Format::Json,
        }
    }
}

/// Search counters of the solver that ran; absent fields do not apply.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Counters {
    pub ladder_len: Option<u64>,
    pub guesses_enumerated: Option<u64>,
    pub guesses_packed: Option<u64>,
    pub dp_cells: Option<u64>,
    pub inner_solves: Option<u64>,
    pub fallbacks: Option<u64>,
    pub fill_violations: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub objective: Objective,
    pub solver: Solver,
    pub epsilon: Epsilon,
    pub instance: Instance,
    pub bagging: Bagging,
    /// (m, Opt(B, m)) for every scenario with positive weight.
    pub scenario_values: Vec<(usize, u64)>,
    pub expected_value: Rational,
    pub oracle_value: Option<Rational>,
    /// Solver over oracle for makespan, oracle over solver for Santa Claus.
    pub ratio: Option<Rational>,
    pub counters: Counters,
    /// Wall-clock per stage; never part of the emitted report.
    pub timings: Vec<(&'static str, Duration)>,
}

fn resolve_instance(config: &ExperimentConfig) -> Result<Instance> {
    let instance = match &config.source {
        InstanceSource::File(path) => {
            let bytes = std::fs::read(path)
                .map_err(|e| Error::validation("input", format!("cannot read {}: {e}", path.display())))?;
            load_instance(&bytes)?
        }
        InstanceSource::Generator(spec) => generate_instance(spec, config.seed)?,
        InstanceSource::Inline(instance) => instance.clone(),
    };
    if let Some(cap) = config.max_jobs {
        if instance.job_count() > cap {
            return Err(Error::validation("instance", format!("n={} exceeds cap {cap}", instance.job_count())));
        }
    }
    if let Some(cap) = config.max_machines {
        if instance.max_machines() > cap {
            return Err(Error::validation("instance", format!("M={} exceeds cap {cap}", instance.max_machines())));
        }
    }
    Ok(instance)
}

fn ratio(objective: Objective, value: &Rational, oracle: &Rational) -> Option<Rational> {
    let (num, den) = match objective {
        Objective::Makespan => (value, oracle),
        Objective::SantaClaus => (oracle, value),
    };
    if den.is_zero() {
        return num.is_zero().then(Rational::one);
    }
    Some(num / den)
}

/// Runs the configured solver and, if asked, the oracle.
pub fn run_experiment(config: &ExperimentConfig) -> Result<EvalReport> {
    let instance = resolve_instance(config)?;
    let budget = &config.budget;
    let objective = config.objective;
    let mut timings = Vec::new();
    let mut counters = Counters::default();

    let started = Instant::now();
    let (bagging, value) = match config.solver {
        Solver::Ptas => match objective {
            Objective::Makespan => {
                let out = solve_makespan(&instance, config.epsilon, budget).map_err(|e| e.in_stage("solve_makespan"))?;
                counters.ladder_len = Some(out.ladder_len as u64);
                counters.guesses_enumerated = Some(out.guesses_enumerated);
                counters.guesses_packed = Some(out.guesses_packed);
                (out.bagging, out.value)
            }
            Objective::SantaClaus => {
                let out = solve_santa(&instance, config.epsilon, budget).map_err(|e| e.in_stage("solve_santa"))?;
                counters.dp_cells = Some(out.stats.cells as u64);
                counters.inner_solves = Some(out.stats.inner_solves as u64);
                counters.fallbacks = Some(out.stats.fallbacks as u64);
                counters.fill_violations = Some(out.stats.fill_records.iter().filter(|r| !r.floor_ok).count() as u64);
                (out.bagging, out.value)
            }
        },
        Solver::Oracle => optimal_bagging(&instance, objective, budget).map_err(|e| e.in_stage("oracle"))?,
        Solver::LptBags => {
            let bagging = Bagging::lpt(instance.processing_times(), instance.max_machines());
            let value = crate::eval::expected_value(&bagging, &instance, objective, Evaluator::Exact, budget)?;
            (bagging, value)
        }
    };
    timings.push(("solve", started.elapsed()));

    let oracle_value = if config.solver == Solver::Oracle {
        Some(value.clone())
    } else if config.with_oracle {
        let started = Instant::now();
        let (_, v) = optimal_bagging(&instance, objective, budget).map_err(|e| e.in_stage("oracle"))?;
        timings.push(("oracle", started.elapsed()));
        Some(v)
    } else {
        None
    };
    let values = scenario_values(&bagging.bag_sizes(&instance), &instance, objective, Evaluator::Exact, budget)?;
    let ratio = oracle_value.as_ref().and_then(|o| ratio(objective, &value, o));
    Ok(EvalReport {
        objective,
        solver: config.solver,
        epsilon: config.epsilon,
        instance,
        bagging,
        scenario_values: values,
        expected_value: value,
        oracle_value,
        ratio,
        counters,
        timings,
    })
}
