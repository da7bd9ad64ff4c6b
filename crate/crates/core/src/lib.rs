//! Scheduling with a stochastic number of identical machines.
//!
//! Jobs are grouped into at most M bags before the machine count m is drawn
//! from a known distribution; the bags are then placed on the m machines.
//! The crate provides approximation schemes for expected makespan
//! (minimization) and expected minimum load (maximization), an exact
//! enumeration oracle for small instances, and an experiment harness.

pub mod budget;
pub mod error;
pub mod eval;
pub mod harness;
pub mod makespan;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod santa;

pub use budget::Budget;
pub use error::{Error, Result};
pub use model::{Bagging, Instance, Objective};
pub use rational::{Epsilon, Rational};
