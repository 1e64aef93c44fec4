//! Exact optimum over grid-aligned preemptive schedules by dynamic
//! programming on the vector of executed work.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{objective, Instance, JobId, Schedule};
use crate::numeric::{format_rational, Rational};

use super::{Method, OptimalResult};

pub const DEFAULT_STATE_BUDGET: usize = 2_000_000;

fn units(x: &Rational, grid: &Rational) -> Result<u64> {
    let q = x / grid;
    if !q.is_integer() {
        return Err(Error::GridMismatch(format_rational(grid)));
    }
    q.to_integer().to_u64().ok_or_else(|| Error::GridMismatch(format_rational(grid)))
}

/// The machine never idles while work is released, so the start time of the
/// k-th unit of work does not depend on which jobs ran before it. The DP
/// therefore only tracks how much of each job is done.
pub fn optimal_dp_timeindexed(instance: &Instance, grid: &Rational, budget: usize) -> Result<OptimalResult> {
    if grid <= &Rational::zero() {
        return Err(Error::Precondition("grid must be positive".into()));
    }
    let jobs = instance.jobs();
    let n = jobs.len();
    let size: Vec<u64> = jobs.iter().map(|j| units(&j.processing, grid)).collect::<Result<_>>()?;
    let release: Vec<u64> = jobs.iter().map(|j| units(&j.release, grid)).collect::<Result<_>>()?;

    let mut states: usize = 1;
    let mut radix = vec![0usize; n];
    for j in 0..n {
        radix[j] = states;
        states = states
            .checked_mul(size[j] as usize + 1)
            .filter(|s| *s <= budget)
            .ok_or(Error::BudgetExceeded(budget as u64))?;
    }

    // Start time of each unit of work in the work-conserving timeline.
    let total: u64 = size.iter().sum();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| release[j]);
    let mut unit_start = Vec::with_capacity(total as usize);
    let mut t = 0u64;
    for &j in &order {
        t = t.max(release[j]);
        for _ in 0..size[j] {
            unit_start.push(t);
            t += 1;
        }
    }
    // Rebuild in time order: releases sorted means unit_start is already ascending.
    debug_assert!(unit_start.windows(2).all(|w| w[0] < w[1]));

    let digit = |state: usize, j: usize| (state / radix[j]) % (size[j] as usize + 1);
    let work_of = |state: usize| (0..n).map(|j| digit(state, j) as u64).sum::<u64>();

    // value[s]: least weighted completion (in grid units) of the jobs still
    // unfinished in state s; None when s cannot be continued.
    let mut value: Vec<Option<Rational>> = vec![None; states];
    let mut pick: Vec<u32> = vec![u32::MAX; states];
    value[states - 1] = Some(Rational::zero());
    for s in (0..states - 1).rev() {
        let w = work_of(s);
        let start = unit_start[w as usize];
        let mut best: Option<(Rational, u32)> = None;
        for j in 0..n {
            let d = digit(s, j) as u64;
            if d == size[j] || release[j] > start {
                continue;
            }
            let Some(rest) = &value[s + radix[j]] else { continue };
            let mut cost = rest.clone();
            if d + 1 == size[j] {
                cost += &jobs[j].weight * Rational::from_integer(BigInt::from(start + 1));
            }
            if best.as_ref().is_none_or(|(b, _)| &cost < b) {
                best = Some((cost, j as u32));
            }
        }
        if let Some((c, j)) = best {
            value[s] = Some(c);
            pick[s] = j;
        }
    }
    if value[0].is_none() {
        return Err(Error::Precondition("no feasible grid schedule".into()));
    }

    let mut schedule = Schedule::default();
    let mut s = 0usize;
    while s != states - 1 {
        let j = pick[s] as usize;
        let start = unit_start[work_of(s) as usize];
        let a = Rational::from_integer(BigInt::from(start)) * grid;
        let b = Rational::from_integer(BigInt::from(start + 1)) * grid;
        schedule.push(JobId(j), a, b);
        s += radix[j];
    }
    let value_exact = objective(&schedule, instance)?;
    debug_assert_eq!(value_exact, value[0].clone().unwrap() * grid);
    Ok(OptimalResult { schedule, objective: value_exact, method: Method::TimeIndexed })
}

/// Largest grid dividing every release and processing time.
pub fn common_grid(instance: &Instance) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::from(1);
    for j in instance.jobs() {
        for x in [&j.release, &j.processing] {
            num = num.gcd(x.numer());
            den = den.lcm(x.denom());
        }
    }
    Rational::new(num, den)
}
