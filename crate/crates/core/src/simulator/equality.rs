use num_traits::Signed;
use serde::Serialize;

use crate::error::Result;
use crate::model::{Instance, JobId, Schedule};
use crate::numeric::{format_rational, Rational};

use super::{simulate, Priority, TieRule};

#[derive(Clone, Debug, Serialize)]
pub struct EqualityViolation {
    pub t: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EqualityReport {
    pub pass: bool,
    pub violations: Vec<EqualityViolation>,
}

/// Job running just before `t` and still unfinished at `t`.
fn running_at(schedule: &Schedule, instance: &Instance, t: &Rational) -> Option<JobId> {
    let s = schedule.slices.iter().find(|s| &s.start < t && t <= &s.end)?;
    let rem = &instance.jobs()[s.job.0].processing - schedule.executed(s.job, t);
    rem.is_positive().then_some(s.job)
}

/// Simulates WSRPT and checks that at every release instant all released jobs
/// share the running job's Smith ratio and each other's.
pub fn is_equality_instance(instance: &Instance, tie: &TieRule) -> Result<EqualityReport> {
    let schedule = simulate(instance, Priority::Wsrpt, tie)?;
    let mut violations = Vec::new();
    for t in instance.release_times() {
        let released: Vec<_> = instance.jobs().iter().filter(|j| j.release == t).collect();
        let mut reference = match running_at(&schedule, instance, &t) {
            Some(id) => {
                let job = &instance.jobs()[id.0];
                let rem = &job.processing - schedule.executed(id, &t);
                Some((id, &job.weight / rem))
            }
            None => None,
        };
        for job in released {
            let ratio = job.density();
            match &reference {
                None => reference = Some((job.id, ratio)),
                Some((other, r)) if *r != ratio => violations.push(EqualityViolation {
                    t: format_rational(&t),
                    detail: format!("{} has ratio {} but {} has {}", job.id, format_rational(&ratio), other, format_rational(r)),
                }),
                _ => {}
            }
        }
    }
    Ok(EqualityReport { pass: violations.is_empty(), violations })
}
