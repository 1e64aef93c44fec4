//! Preemptive single-machine scheduling with release dates under the total
//! weighted completion time objective: an exact simulator for WSRPT and
//! related policies, optimal-schedule oracles, worst-case instance families,
//! their continuous analysis, and a two-job adversary game.

pub mod adversary;
pub mod analysis;
pub mod error;
pub mod fuzz;
pub mod instances;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod render;
pub mod simulator;

pub use error::{Error, Result};
pub use model::{objective, smith_ratio, Instance, Job, JobId, Schedule, Slice, Tags, TieScript};
pub use numeric::Rational;
