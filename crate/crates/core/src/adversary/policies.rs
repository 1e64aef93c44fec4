//! Online policies that only make sense against the two-job game.

use num_traits::Signed;

use crate::error::Result;
use crate::model::JobId;
use crate::numeric::Rational;
use crate::simulator::{DecisionView, Dispatch, OnlinePolicy, Priority, PriorityPolicy, TieRule};

/// Runs one fixed job whenever it is available, otherwise WSRPT.
#[derive(Clone, Debug)]
pub struct FixedFirst {
    pub job: JobId,
    pub fallback: PriorityPolicy,
}

impl FixedFirst {
    pub fn new(job: JobId) -> FixedFirst {
        FixedFirst { job, fallback: PriorityPolicy::new(Priority::Wsrpt, TieRule::PreferRunning) }
    }
}

impl OnlinePolicy for FixedFirst {
    fn priority(&self) -> Priority {
        Priority::Wsrpt
    }

    fn dispatch(&mut self, view: &DecisionView<'_>) -> Result<Dispatch> {
        if view.is_available(self.job) {
            return Ok(Dispatch::run(self.job));
        }
        self.fallback.dispatch(view)
    }
}

/// Runs the first job down to `lambda` of its length, then the second job
/// down to `lambda` of its length, then WSRPT. Both remainders then have the
/// same Smith ratio `1/lambda` when weights equal lengths.
#[derive(Clone, Debug)]
pub struct Equalizer {
    pub lambda: Rational,
    pub fallback: PriorityPolicy,
}

impl Equalizer {
    pub fn new(lambda: Rational) -> Equalizer {
        Equalizer { lambda, fallback: PriorityPolicy::new(Priority::Wsrpt, TieRule::PreferRunning) }
    }
}

impl OnlinePolicy for Equalizer {
    fn priority(&self) -> Priority {
        Priority::Wsrpt
    }

    fn dispatch(&mut self, view: &DecisionView<'_>) -> Result<Dispatch> {
        for id in [JobId(0), JobId(1)] {
            if !view.is_available(id) {
                continue;
            }
            let excess = view.remaining(id) - &self.lambda * &view.job(id).processing;
            if excess.is_positive() {
                return Ok(Dispatch { job: id, until: Some(view.now + excess) });
            }
        }
        self.fallback.dispatch(view)
    }
}
