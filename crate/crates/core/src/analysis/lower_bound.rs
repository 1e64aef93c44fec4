//! Two long jobs (p = w) released at 0 and one block of small jobs.

use serde::Serialize;

use crate::error::{Error, Result};

use super::search::golden_max;

fn check(p1: f64, p2: f64) -> Result<()> {
    if !(p1 > 0.0 && p2 > p1) {
        return Err(Error::Domain(format!("need p2 > p1 > 0 (p1={p1}, p2={p2})")));
    }
    Ok(())
}

/// Block length answering a run of the second job over `[0, p1]`.
pub fn l1(p1: f64, p2: f64) -> f64 {
    ((2.0 * p2.powi(3) - 2.0 * p1.powi(3)) / p2).sqrt()
}

/// Block length answering the first job completed by `p1` and the second
/// left with `p1` at time `p2`.
pub fn l2(p1: f64, p2: f64) -> f64 {
    (2.0 * (p1 * p1 + p1 * p2 + p2 * p2) * p1 / p2).sqrt()
}

/// Ratio when the second job runs first and the block arrives at `p1`.
pub fn lb_c1(p1: f64, p2: f64) -> Result<f64> {
    check(p1, p2)?;
    let l = l1(p1, p2);
    let rho = p2 / (p2 - p1);
    Ok(1.0 + p1 * l / (p1 * p1 + rho * l * (p1 + l / 2.0) + p2 * (p2 + l + p1)))
}

/// Ratio when the first job runs first and the block arrives at `p2`.
pub fn lb_c2(p1: f64, p2: f64) -> Result<f64> {
    check(p1, p2)?;
    let l = l2(p1, p2);
    let rho = p2 / p1;
    Ok(1.0 + (p2 - p1) * l / (rho * l * (p2 + l / 2.0) + p2 * p2 + p1 * p2 + p1 * l + p1 * p1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LbPoint {
    pub p2: f64,
    pub c1: f64,
    pub c2: f64,
}

pub fn lb_curves(p1: f64, p2s: &[f64]) -> Result<Vec<LbPoint>> {
    p2s.iter().map(|&p2| Ok(LbPoint { p2, c1: lb_c1(p1, p2)?, c2: lb_c2(p1, p2)? })).collect()
}

/// Crossing of the two curves by bisection on `[1.5 p1, 10 p1]` to 1e-12.
pub fn lb_intersection(p1: f64) -> Result<LbPoint> {
    let gap = |p2: f64| -> Result<f64> { Ok(lb_c1(p1, p2)? - lb_c2(p1, p2)?) };
    let (mut a, mut b) = (1.5 * p1, 10.0 * p1);
    if gap(a)? <= 0.0 || gap(b)? >= 0.0 {
        return Err(Error::Domain("curves do not cross in the bracket".into()));
    }
    while b - a > 1e-12 * p1 {
        let m = 0.5 * (a + b);
        if gap(m)? > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let p2 = 0.5 * (a + b);
    Ok(LbPoint { p2, c1: lb_c1(p1, p2)?, c2: lb_c2(p1, p2)? })
}

/// Maximizes the smaller of the two curves over `p2` in `(p1, 10 p1]`.
pub fn optimize_lb() -> (f64, f64) {
    golden_max(|p2| lb_c1(1.0, p2).unwrap_or(0.0).min(lb_c2(1.0, p2).unwrap_or(0.0)), 1.0 + 1e-9, 10.0, 1e-10)
}

/// Bound for the equalizing branch when the block arrives by `(p1+p2)/2`,
/// with block length equal to the second job's remainder.
pub fn middle_bound_early(p1: f64, p2: f64) -> f64 {
    1.0 + p1 * p2 / (p1 * p1 + 2.0 * p1 * p2 + 2.0 * p2 * p2 + p2 * p2 * (p2 / 2.0 - p1) / (p1 + p2))
}

/// Bound for the equalizing branch when the block arrives after `(p1+p2)/2`.
pub fn middle_bound_late(p1: f64, p2: f64) -> f64 {
    1.0 + p1 * p2 / (2.25 * p2 * p2 + 1.5 * p1 * p2 + p1 * p1)
}
