//! Incremental event-driven engine. Jobs may be added while the engine runs,
//! which lets an adversary react to the schedule prefix only.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{Job, JobId, Schedule, TieScript};
use crate::numeric::{format_rational, Rational};

use super::Priority;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dispatch {
    pub job: JobId,
    /// Re-decide at this time even if nothing else happens.
    pub until: Option<Rational>,
}

impl Dispatch {
    pub fn run(job: JobId) -> Dispatch {
        Dispatch { job, until: None }
    }
}

/// What a policy sees at a decision point.
pub struct DecisionView<'a> {
    pub now: &'a Rational,
    jobs: &'a [Job],
    remaining: &'a [Rational],
    ready: &'a BTreeMap<Rational, BTreeSet<JobId>>,
    /// Job that ran up to `now` and is still unfinished.
    pub previous: Option<JobId>,
    /// Jobs released exactly at `now`.
    pub released_now: &'a [JobId],
}

impl<'a> DecisionView<'a> {
    pub fn job(&self, id: JobId) -> &Job {
        &self.jobs[id.0]
    }

    pub fn remaining(&self, id: JobId) -> &Rational {
        &self.remaining[id.0]
    }

    pub fn is_available(&self, id: JobId) -> bool {
        id.0 < self.jobs.len() && self.jobs[id.0].release <= *self.now && self.remaining[id.0].is_positive()
    }

    /// Available jobs with the largest key, ascending id.
    pub fn candidates(&self) -> Vec<JobId> {
        self.ready
            .iter()
            .next_back()
            .map(|(_, ids)| ids.iter().copied().collect())
            .unwrap_or_default()
    }

    pub fn available(&self) -> impl Iterator<Item = JobId> + '_ {
        self.ready.values().flat_map(|ids| ids.iter().copied())
    }
}

pub trait OnlinePolicy {
    fn priority(&self) -> Priority;
    fn dispatch(&mut self, view: &DecisionView<'_>) -> Result<Dispatch>;
}

impl<T: OnlinePolicy + ?Sized> OnlinePolicy for Box<T> {
    fn priority(&self) -> Priority {
        (**self).priority()
    }

    fn dispatch(&mut self, view: &DecisionView<'_>) -> Result<Dispatch> {
        (**self).dispatch(view)
    }
}

/// How equal-key candidates are resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TieRule {
    PreferRunning,
    PreferNewLongest,
    PreferNewShortest,
    Scripted(TieScript),
    /// Batch simulation searches all tie branches; online use picks the smallest id.
    ExhaustiveWorst,
}

impl TieRule {
    pub fn resolve(&self, view: &DecisionView<'_>) -> Result<JobId> {
        let cands = view.candidates();
        let first = *cands.first().ok_or_else(|| Error::InfeasibleDispatch("no available job".into()))?;
        if let TieRule::Scripted(script) = self {
            if let Some(choice) = script.get(view.now) {
                if !cands.contains(&choice) {
                    return Err(Error::ScriptViolation { t: format_rational(view.now), choice: choice.0 });
                }
                return Ok(choice);
            }
        }
        if cands.len() == 1 {
            return Ok(first);
        }
        let running = || match view.previous {
            Some(p) if cands.contains(&p) => p,
            _ => first,
        };
        let fresh: Vec<JobId> = cands.iter().copied().filter(|c| view.released_now.contains(c)).collect();
        Ok(match self {
            TieRule::PreferRunning | TieRule::Scripted(_) => running(),
            TieRule::ExhaustiveWorst => first,
            TieRule::PreferNewLongest => fresh
                .iter()
                .copied()
                .max_by(|a, b| view.remaining(*a).cmp(view.remaining(*b)).then(b.cmp(a)))
                .unwrap_or_else(running),
            TieRule::PreferNewShortest => fresh
                .iter()
                .copied()
                .min_by(|a, b| view.remaining(*a).cmp(view.remaining(*b)).then(a.cmp(b)))
                .unwrap_or_else(running),
        })
    }
}

/// Runs the available job of largest key, ties per the rule.
#[derive(Clone, Debug)]
pub struct PriorityPolicy {
    pub priority: Priority,
    pub tie: TieRule,
}

impl PriorityPolicy {
    pub fn new(priority: Priority, tie: TieRule) -> PriorityPolicy {
        PriorityPolicy { priority, tie }
    }
}

impl OnlinePolicy for PriorityPolicy {
    fn priority(&self) -> Priority {
        self.priority
    }

    fn dispatch(&mut self, view: &DecisionView<'_>) -> Result<Dispatch> {
        Ok(Dispatch::run(self.tie.resolve(view)?))
    }
}

pub struct Engine<P> {
    policy: P,
    priority: Priority,
    jobs: Vec<Job>,
    remaining: Vec<Rational>,
    keys: Vec<Option<Rational>>,
    ready: BTreeMap<Rational, BTreeSet<JobId>>,
    pending: BTreeMap<Rational, Vec<JobId>>,
    now: Rational,
    released_now: Vec<JobId>,
    current: Option<Dispatch>,
    previous: Option<JobId>,
    needs_decision: bool,
    schedule: Schedule,
}

impl<P: OnlinePolicy> Engine<P> {
    pub fn new(policy: P) -> Engine<P> {
        let priority = policy.priority();
        Engine {
            policy,
            priority,
            jobs: Vec::new(),
            remaining: Vec::new(),
            keys: Vec::new(),
            ready: BTreeMap::new(),
            pending: BTreeMap::new(),
            now: Rational::zero(),
            released_now: Vec::new(),
            current: None,
            previous: None,
            needs_decision: true,
            schedule: Schedule::default(),
        }
    }

    pub fn now(&self) -> &Rational {
        &self.now
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn remaining(&self, id: JobId) -> &Rational {
        &self.remaining[id.0]
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn policy(&self) -> &P {
        &self.policy
    }

    pub fn into_parts(self) -> (Vec<Job>, Schedule) {
        (self.jobs, self.schedule)
    }

    /// Registers a job; its release may not lie in the past.
    pub fn add_job(&mut self, release: Rational, processing: Rational, weight: Rational) -> Result<JobId> {
        if release < self.now {
            return Err(Error::Precondition(format!(
                "release {} lies before the current time {}",
                format_rational(&release),
                format_rational(&self.now)
            )));
        }
        let id = self.jobs.len();
        let job = Job::new(id, release, processing, weight)?;
        self.remaining.push(job.processing.clone());
        self.keys.push(None);
        self.pending.entry(job.release.clone()).or_default().push(job.id);
        self.jobs.push(job);
        self.release_due();
        Ok(JobId(id))
    }

    fn release_due(&mut self) {
        while let Some(entry) = self.pending.first_entry() {
            if entry.key() > &self.now {
                break;
            }
            for id in entry.remove() {
                self.set_key(id);
                self.released_now.push(id);
            }
            self.needs_decision = true;
        }
    }

    fn set_key(&mut self, id: JobId) {
        if let Some(old) = self.keys[id.0].take() {
            if let Some(set) = self.ready.get_mut(&old) {
                set.remove(&id);
                if set.is_empty() {
                    self.ready.remove(&old);
                }
            }
        }
        if self.remaining[id.0].is_positive() {
            let key = self.priority.key(&self.jobs[id.0], &self.remaining[id.0]);
            self.ready.entry(key.clone()).or_default().insert(id);
            self.keys[id.0] = Some(key);
        }
    }

    fn decide(&mut self) -> Result<()> {
        if !self.needs_decision && self.current.is_some() {
            return Ok(());
        }
        let view = DecisionView {
            now: &self.now,
            jobs: &self.jobs,
            remaining: &self.remaining,
            ready: &self.ready,
            previous: self.previous,
            released_now: &self.released_now,
        };
        let d = self.policy.dispatch(&view)?;
        if !view.is_available(d.job) {
            return Err(Error::InfeasibleDispatch(format!("{} is not available at {}", d.job, format_rational(&self.now))));
        }
        if let Some(u) = &d.until {
            if u <= &self.now {
                return Err(Error::InfeasibleDispatch("dispatch horizon not in the future".into()));
            }
        }
        self.current = Some(d);
        self.needs_decision = false;
        Ok(())
    }

    /// The job about to run and the time at which the engine will next stop
    /// on its own. `None` when no job is available now.
    pub fn peek(&mut self) -> Result<Option<(JobId, Rational)>> {
        self.release_due();
        if self.ready.is_empty() {
            return Ok(None);
        }
        self.decide()?;
        let d = self.current.as_ref().expect("decided");
        let mut end = &self.now + &self.remaining[d.job.0];
        if let Some(u) = &d.until {
            end = end.min(u.clone());
        }
        if let Some(next) = self.pending.keys().next() {
            end = end.min(next.clone());
        }
        Ok(Some((d.job, end)))
    }

    /// Advances by one run interval, never past `horizon`. Returns false when
    /// nothing moved (horizon reached or all work done).
    pub fn step(&mut self, horizon: Option<&Rational>) -> Result<bool> {
        if horizon.is_some_and(|h| h <= &self.now) {
            return Ok(false);
        }
        let Some((job, mut end)) = self.peek()? else {
            let Some(next) = self.pending.keys().next().cloned() else {
                return Ok(false);
            };
            self.now = match horizon {
                Some(h) if h < &next => h.clone(),
                _ => next,
            };
            self.released_now.clear();
            self.previous = None;
            self.release_due();
            return Ok(true);
        };
        if let Some(h) = horizon {
            end = end.min(h.clone());
        }
        let ran = &end - &self.now;
        self.schedule.push(job, self.now.clone(), end.clone());
        self.remaining[job.0] -= &ran;
        self.set_key(job);
        self.now = end;
        self.released_now.clear();
        self.previous = Some(job);
        if self.remaining[job.0].is_zero() {
            self.previous = None;
            self.current = None;
            self.needs_decision = true;
        } else if self.current.as_ref().and_then(|d| d.until.as_ref()) == Some(&self.now) {
            self.current = None;
            self.needs_decision = true;
        }
        self.release_due();
        Ok(true)
    }

    pub fn run_until(&mut self, horizon: &Rational) -> Result<()> {
        while self.step(Some(horizon))? {}
        Ok(())
    }

    pub fn run_to_completion(&mut self) -> Result<()> {
        while self.step(None)? {}
        Ok(())
    }

    pub fn is_finished(&self) -> bool {
        self.pending.is_empty() && self.ready.is_empty()
    }
}
