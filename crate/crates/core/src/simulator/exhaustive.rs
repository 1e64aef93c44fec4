//! Worst-case tie resolution by depth-first search over every tie branch.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::rc::Rc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{Instance, JobId, Schedule, Slice};
use crate::numeric::Rational;

use super::Priority;

pub const DEFAULT_BRANCH_BUDGET: u64 = 1 << 20;

struct Outcome {
    cost: Rational,
    slices: Vec<Slice>,
}

struct Search<'a> {
    instance: &'a Instance,
    priority: Priority,
    releases: Vec<Rational>,
    memo: HashMap<(Rational, Vec<Rational>), Rc<Outcome>>,
    branches: u64,
    budget: u64,
}

fn cmp_slices(a: &[Slice], b: &[Slice]) -> Ordering {
    a.iter().map(Slice::sort_key).cmp(b.iter().map(Slice::sort_key))
}

impl Search<'_> {
    fn explore(&mut self, t: Rational, rem: Vec<Rational>) -> Result<Rc<Outcome>> {
        let key = (t, rem);
        if let Some(o) = self.memo.get(&key) {
            return Ok(o.clone());
        }
        let (t, rem) = key;
        let jobs = self.instance.jobs();
        let next_release = self.releases.iter().find(|r| **r > t).cloned();
        let available: Vec<usize> = (0..jobs.len()).filter(|&i| jobs[i].release <= t && rem[i].is_positive()).collect();

        let outcome = if available.is_empty() {
            match next_release {
                Some(r) if rem.iter().any(|x| x.is_positive()) => self.explore(r, rem.clone())?,
                _ => Rc::new(Outcome { cost: Rational::zero(), slices: Vec::new() }),
            }
        } else {
            let keys: Vec<Rational> = available.iter().map(|&i| self.priority.key(&jobs[i], &rem[i])).collect();
            let top = keys.iter().max().expect("nonempty").clone();
            // Identical candidates lead to identical futures; keep the smallest id of each.
            let mut cands: Vec<usize> = Vec::new();
            for (&i, k) in available.iter().zip(&keys) {
                if *k == top
                    && !cands.iter().any(|&c| {
                        jobs[c].weight == jobs[i].weight && rem[c] == rem[i] && jobs[c].processing == jobs[i].processing
                    })
                {
                    cands.push(i);
                }
            }
            if cands.len() > 1 {
                self.branches += cands.len() as u64;
                if self.branches > self.budget {
                    return Err(Error::BudgetExceeded(self.budget));
                }
            }
            let mut best: Option<Outcome> = None;
            for c in cands {
                let finish = &t + &rem[c];
                let end = match &next_release {
                    Some(r) if *r < finish => r.clone(),
                    _ => finish.clone(),
                };
                let mut next_rem = rem.clone();
                next_rem[c] -= &end - &t;
                let done = next_rem[c].is_zero();
                let child = self.explore(end.clone(), next_rem)?;
                let mut cost = child.cost.clone();
                if done {
                    cost += &jobs[c].weight * &end;
                }
                let mut slices = Vec::with_capacity(child.slices.len() + 1);
                slices.push(Slice { job: JobId(c), start: t.clone(), end: end.clone() });
                let mut rest = child.slices.iter();
                if let Some(first) = child.slices.first() {
                    if first.job == JobId(c) && first.start == end {
                        slices[0].end = first.end.clone();
                        rest.next();
                    }
                }
                slices.extend(rest.cloned());
                let better = match &best {
                    None => true,
                    Some(b) => cost > b.cost || (cost == b.cost && cmp_slices(&slices, &b.slices) == Ordering::Less),
                };
                if better {
                    best = Some(Outcome { cost, slices });
                }
            }
            Rc::new(best.expect("at least one candidate"))
        };
        self.memo.insert((t, rem), outcome.clone());
        Ok(outcome)
    }
}

/// Schedule of maximum objective among all tie resolutions, ties in the
/// objective broken by the lexicographically smallest slice list.
/// Returns the schedule and its objective.
pub fn simulate_worst(instance: &Instance, priority: Priority, budget: u64) -> Result<(Schedule, Rational)> {
    let mut search = Search {
        instance,
        priority,
        releases: instance.release_times(),
        memo: HashMap::new(),
        branches: 0,
        budget,
    };
    let rem: Vec<Rational> = instance.jobs().iter().map(|j| j.processing.clone()).collect();
    let start = search.releases[0].clone();
    let out = search.explore(start, rem)?;
    Ok((Schedule::new(out.slices.clone()), out.cost.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::objective;
    use crate::numeric::int;

    #[test]
    fn picks_the_worse_of_two_ties() {
        // J0 and J1 tie at t=0. Starting J1 lets it outrank J2 at t=1, which costs 25/2 instead of 12.
        let inst = Instance::from_triples(vec![
            (int(0), int(1), int(1)),
            (int(0), int(2), int(2)),
            (int(1), int(1), crate::numeric::ratio(3, 2)),
        ])
        .unwrap();
        let (s, cost) = simulate_worst(&inst, Priority::Wsrpt, DEFAULT_BRANCH_BUDGET).unwrap();
        assert_eq!(cost, objective(&s, &inst).unwrap());
        assert_eq!(cost, crate::numeric::ratio(25, 2));
        assert_eq!(s.slices[0].job, JobId(1));
    }

    #[test]
    fn budget_is_enforced() {
        let inst = Instance::from_triples((0..6).map(|i| (int(0), int(i + 1), int(i + 1))).collect()).unwrap();
        assert!(matches!(simulate_worst(&inst, Priority::Wsrpt, 3), Err(Error::BudgetExceeded(3))));
        assert!(simulate_worst(&inst, Priority::Wsrpt, DEFAULT_BRANCH_BUDGET).is_ok());
    }
}
