//! Optimal schedules: exact searches and the structured form of the
//! generated families.

mod pair;
mod timeindexed;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{objective, Instance, Job, JobId, Schedule};
use crate::simulator::{Engine, Priority, PriorityPolicy, TieRule};
use crate::numeric::Rational;

pub use pair::{closed_pair_optimal, pair_objective, Block, PairUnit};
pub use timeindexed::{common_grid, optimal_dp_timeindexed, DEFAULT_STATE_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BruteForce,
    TimeIndexed,
    Structured,
    ClosedPair,
}

#[derive(Clone, Debug)]
pub struct OptimalResult {
    pub schedule: Schedule,
    pub objective: Rational,
    pub method: Method,
}

/// Preemptive list schedule: always runs the released unfinished job that
/// comes first in `order`.
pub fn priority_schedule(instance: &Instance, order: &[JobId]) -> Result<Schedule> {
    let n = instance.len();
    let mut rank = vec![usize::MAX; n];
    for (pos, id) in order.iter().enumerate() {
        if id.0 >= n || rank[id.0] != usize::MAX {
            return Err(Error::Precondition("order is not a permutation of the jobs".into()));
        }
        rank[id.0] = pos;
    }
    if order.len() != n {
        return Err(Error::Precondition("order is not a permutation of the jobs".into()));
    }
    let jobs = instance.jobs();
    let mut by_release: Vec<usize> = (0..n).collect();
    by_release.sort_by(|&a, &b| jobs[a].release.cmp(&jobs[b].release).then(a.cmp(&b)));
    let mut rem: Vec<Rational> = jobs.iter().map(|j| j.processing.clone()).collect();
    let mut ready: BTreeMap<usize, usize> = BTreeMap::new();
    let mut next = 0;
    let mut t = jobs[by_release[0]].release.clone();
    let mut schedule = Schedule::default();
    loop {
        while next < n && jobs[by_release[next]].release <= t {
            let j = by_release[next];
            ready.insert(rank[j], j);
            next += 1;
        }
        let Some((&r, &j)) = ready.iter().next() else {
            if next == n {
                break;
            }
            t = jobs[by_release[next]].release.clone();
            continue;
        };
        let mut end = &t + &rem[j];
        if next < n && jobs[by_release[next]].release < end {
            end = jobs[by_release[next]].release.clone();
        }
        rem[j] -= &end - &t;
        schedule.push(JobId(j), t, end.clone());
        t = end;
        if rem[j].is_zero() {
            ready.remove(&r);
        }
    }
    Ok(schedule)
}

/// Busy intervals of the work-conserving schedule of the jobs in `set`.
fn occupancy(instance: &Instance, set: u32, by_release: &[usize]) -> Vec<(Rational, Rational)> {
    let jobs = instance.jobs();
    let mut out: Vec<(Rational, Rational)> = Vec::new();
    for &j in by_release.iter().filter(|&&j| set & (1 << j) != 0) {
        let job = &jobs[j];
        match out.last_mut() {
            Some((_, end)) if *end >= job.release => *end += &job.processing,
            _ => out.push((job.release.clone(), &job.release + &job.processing)),
        }
    }
    out
}

/// Completion time of a job released at `release` needing `work`, run in the
/// gaps of `busy`.
fn fill(busy: &[(Rational, Rational)], release: &Rational, work: &Rational) -> Rational {
    let mut t = release.clone();
    let mut need = work.clone();
    for (a, b) in busy {
        if b <= &t {
            continue;
        }
        if a > &t {
            let gap = a - &t;
            if need <= gap {
                return t + need;
            }
            need -= gap;
        }
        t = b.clone();
    }
    t + need
}

pub const DEFAULT_MAX_N: usize = 10;

/// Minimum objective over all priority orders.
///
/// In a priority schedule a job's completion depends only on the set of jobs
/// ahead of it, whose work-conserving occupancy is order-free. So the best
/// order is found by a dynamic program over subsets, choosing the lowest
/// priority job of each subset. The result equals the minimum over all n!
/// orders.
pub fn optimal_bruteforce(instance: &Instance, max_n: usize) -> Result<OptimalResult> {
    let n = instance.len();
    if n > max_n || n > 20 {
        return Err(Error::TooManyJobs { n, max: max_n.min(20) });
    }
    let jobs = instance.jobs();
    let mut by_release: Vec<usize> = (0..n).collect();
    by_release.sort_by(|&a, &b| jobs[a].release.cmp(&jobs[b].release).then(a.cmp(&b)));
    let full: u32 = (1u32 << n) - 1;
    let mut best: Vec<Option<(Rational, usize)>> = vec![None; (full as usize) + 1];
    best[0] = Some((Rational::zero(), usize::MAX));
    for set in 1..=full {
        let mut choice: Option<(Rational, usize)> = None;
        for j in (0..n).filter(|j| set & (1 << j) != 0) {
            let rest = set & !(1 << j);
            let (base, _) = best[rest as usize].as_ref().expect("subsets come first");
            let busy = occupancy(instance, rest, &by_release);
            let c = fill(&busy, &jobs[j].release, &jobs[j].processing);
            let cost = base + &jobs[j].weight * c;
            if choice.as_ref().is_none_or(|(b, _)| &cost < b) {
                choice = Some((cost, j));
            }
        }
        best[set as usize] = choice;
    }
    let mut order = Vec::with_capacity(n);
    let mut set = full;
    while set != 0 {
        let (_, j) = best[set as usize].as_ref().expect("filled");
        order.push(JobId(*j));
        set &= !(1 << j);
    }
    order.reverse();
    let schedule = priority_schedule(instance, &order)?;
    let value = objective(&schedule, instance)?;
    debug_assert_eq!(Some(&value), best[full as usize].as_ref().map(|(c, _)| c));
    Ok(OptimalResult { schedule, objective: value, method: Method::BruteForce })
}

/// The optimum shape of the generated families: the small jobs alone under
/// WSRPT (running job kept on ties), and the long jobs in the remaining gaps,
/// larger weight-over-processing ratio first. With fine grids this runs floor
/// jobs at release and the backlog by decreasing ratio; with coarse grids it
/// also finishes a nearly done small job before a fresh one of higher ratio.
pub fn structured_optimal(instance: &Instance) -> Result<OptimalResult> {
    if instance.tags.kind.is_none() || instance.tags.long_jobs.is_empty() {
        return Err(Error::NotGenerated);
    }
    let long = &instance.tags.long_jobs;
    let jobs = instance.jobs();
    let small: Vec<&Job> = jobs.iter().filter(|j| !long.contains(&j.id)).collect();
    let mut pieces: Vec<(Rational, JobId, Rational)> = Vec::new();
    if !small.is_empty() {
        let mut engine = Engine::new(PriorityPolicy::new(Priority::Wsrpt, TieRule::PreferRunning));
        for j in &small {
            engine.add_job(j.release.clone(), j.processing.clone(), j.weight.clone())?;
        }
        engine.run_to_completion()?;
        let (_, sched) = engine.into_parts();
        pieces.extend(sched.slices.into_iter().map(|s| (s.start, small[s.job.0].id, s.end)));
    }
    let mut longs: Vec<&Job> = long.iter().map(|&id| instance.job(id)).collect::<Result<_>>()?;
    longs.sort_by(|a, b| b.density().cmp(&a.density()).then(a.id.cmp(&b.id)));
    for job in longs {
        pieces.sort();
        let mut t = job.release.clone();
        let mut need = job.processing.clone();
        let mut placed = Vec::new();
        for (a, _, b) in &pieces {
            if need.is_zero() {
                break;
            }
            if b <= &t {
                continue;
            }
            if a > &t {
                let run = (a - &t).min(need.clone());
                placed.push((t.clone(), job.id, &t + &run));
                need -= run;
            }
            t = t.max(b.clone());
        }
        if need.is_positive() {
            placed.push((t.clone(), job.id, &t + &need));
        }
        pieces.extend(placed);
    }
    pieces.sort();
    let mut schedule = Schedule::default();
    for (a, j, b) in pieces {
        schedule.push(j, a, b);
    }
    let value = objective(&schedule, instance)?;
    Ok(OptimalResult { schedule, objective: value, method: Method::Structured })
}
