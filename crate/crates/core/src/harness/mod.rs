//! Instance I/O, generators, the experiment runner, reports, and the
//! acceptance suites.

pub mod experiment;
pub mod gen;
pub mod io;
pub mod report;
pub mod suites;

pub use experiment::{run_experiment, Counters, EvalReport, ExperimentConfig, Format, InstanceSource, Solver};
pub use gen::{generate_instance, GeneratorSpec};
pub use io::{instance_to_json, load_instance};
pub use report::emit_report;
pub use suites::{suite_run, CriterionResult, SUITES};
