mod engine;
mod equality;
mod exhaustive;
mod segments;
mod split;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Instance, Job, Schedule};
use crate::numeric::Rational;

pub use engine::{DecisionView, Dispatch, Engine, OnlinePolicy, PriorityPolicy, TieRule};
pub use equality::{is_equality_instance, EqualityReport, EqualityViolation};
pub use exhaustive::{simulate_worst, DEFAULT_BRANCH_BUDGET};
pub use segments::{segments, Segment};
pub use split::split_job;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Priority {
    /// Weight over remaining processing time.
    Wsrpt,
    /// Weight over original processing time.
    WsptPreemptive,
    /// Inverse remaining processing time.
    Srpt,
}

impl Priority {
    pub fn key(&self, job: &Job, remaining: &Rational) -> Rational {
        match self {
            Priority::Wsrpt => &job.weight / remaining,
            Priority::WsptPreemptive => job.density(),
            Priority::Srpt => remaining.recip(),
        }
    }
}

/// Runs `priority` on the instance with ties resolved by `tie`.
pub fn simulate(instance: &Instance, priority: Priority, tie: &TieRule) -> Result<Schedule> {
    if let TieRule::ExhaustiveWorst = tie {
        return simulate_worst(instance, priority, DEFAULT_BRANCH_BUDGET).map(|(s, _)| s);
    }
    let mut engine = Engine::new(PriorityPolicy::new(priority, tie.clone()));
    for j in instance.jobs() {
        engine.add_job(j.release.clone(), j.processing.clone(), j.weight.clone())?;
    }
    engine.run_to_completion()?;
    Ok(engine.into_parts().1)
}

/// Uses the instance's own tie script when present, else prefer-running.
pub fn default_tie(instance: &Instance) -> TieRule {
    match &instance.tie_script {
        Some(s) => TieRule::Scripted(s.clone()),
        None => TieRule::PreferRunning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{objective, JobId};
    use crate::numeric::{int, ratio};

    #[test]
    fn single_job() {
        let inst = Instance::from_triples(vec![(int(0), int(3), int(2))]).unwrap();
        let s = simulate(&inst, Priority::Wsrpt, &TieRule::PreferRunning).unwrap();
        assert_eq!(s.slices.len(), 1);
        assert_eq!(objective(&s, &inst).unwrap(), int(6));
    }

    #[test]
    fn wsrpt_preempts_for_higher_ratio() {
        let inst = Instance::from_triples(vec![(int(0), int(2), int(1)), (int(1), int(1), int(9))]).unwrap();
        let s = simulate(&inst, Priority::Wsrpt, &TieRule::PreferRunning).unwrap();
        let jobs: Vec<_> = s.slices.iter().map(|x| x.job.0).collect();
        assert_eq!(jobs, vec![0, 1, 0]);
        assert_eq!(objective(&s, &inst).unwrap(), int(9 * 2 + 3));
    }

    #[test]
    fn wsrpt_keeps_job_that_gained_ratio() {
        // J0 has run half its length, so its Smith ratio 2 beats the newcomer's 3/2.
        let inst = Instance::from_triples(vec![(int(0), int(2), int(2)), (int(1), int(2), int(3))]).unwrap();
        let s = simulate(&inst, Priority::Wsrpt, &TieRule::PreferRunning).unwrap();
        assert_eq!(s.slices[0].job, JobId(0));
        assert_eq!(s.slices[0].end, int(2));
        let w = simulate(&inst, Priority::WsptPreemptive, &TieRule::PreferRunning).unwrap();
        assert_eq!(w.slices[0].end, int(1));
    }

    #[test]
    fn tie_rules_differ_on_tie() {
        // At t=1/2 J0 has Smith ratio 2, equal to J1 (w=1, p=1/2).
        let inst = Instance::from_triples(vec![(int(0), int(1), int(1)), (ratio(1, 2), ratio(1, 2), int(1))]).unwrap();
        let keep = simulate(&inst, Priority::Wsrpt, &TieRule::PreferRunning).unwrap();
        assert_eq!(keep.slices.len(), 2);
        assert_eq!(keep.slices[0].end, int(1));
        let fresh = simulate(&inst, Priority::Wsrpt, &TieRule::PreferNewShortest).unwrap();
        assert_eq!(fresh.slices.len(), 3);
        assert_eq!(fresh.slices[1].job, JobId(1));
        let worst = simulate(&inst, Priority::Wsrpt, &TieRule::ExhaustiveWorst).unwrap();
        assert_eq!(objective(&worst, &inst).unwrap(), objective(&keep, &inst).unwrap());
    }

    #[test]
    fn script_violation_is_an_error() {
        let inst = Instance::from_triples(vec![(int(0), int(1), int(1)), (int(0), int(1), int(5))]).unwrap();
        let mut script = crate::model::TieScript::new();
        script.insert(int(0), JobId(0));
        assert!(simulate(&inst, Priority::Wsrpt, &TieRule::Scripted(script)).is_err());
    }
}
