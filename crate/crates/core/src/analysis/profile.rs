//! Continuous basic scenario: one long job (r=0, p=w=1) plus small-job
//! mass released while it runs. Floor density 1 on `[0, v)`, wall density
//! `rho = (1+z)/(1-y)` on `(v, y]`, block of length `z` at `y`. Mass released
//! at `x` has weight density `1/(1-x)`.
//!
//! WSRPT runs the long job on `[0, 1]` and then the small mass by decreasing
//! ratio. The optimum runs floor mass at release and one unit per unit time
//! of the wall, builds a wall backlog of density `rho - 1`, and after `y`
//! runs block, backlog and finally the long job.

use serde::Serialize;

use crate::error::{Error, Result};

use super::search::{compass_max, golden_max, integrate};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScenarioMetrics {
    pub c: f64,
    pub c_star: f64,
    pub ratio: f64,
    pub w: f64,
    pub l: f64,
}

impl ScenarioMetrics {
    fn new(c: f64, c_star: f64, w: f64, l: f64) -> ScenarioMetrics {
        ScenarioMetrics { c, c_star, ratio: c / c_star, w, l }
    }
}

fn check(y: f64, v: f64, z: f64) -> Result<()> {
    if !(y > 0.0 && y < 1.0) || !(0.0..=y).contains(&v) || z.is_nan() || z < 0.0 {
        return Err(Error::Domain(format!("need 0 <= v <= y < 1 and z >= 0, got y={y} v={v} z={z}")));
    }
    Ok(())
}

/// Closed forms of the continuous scenario. `v` defaults to `y`, `z` to 0.
pub fn closed_metrics(y: f64, v: Option<f64>, z: Option<f64>) -> Result<ScenarioMetrics> {
    let v = v.unwrap_or(y);
    let z = z.unwrap_or(0.0);
    check(y, v, z)?;
    let rho = (1.0 + z) / (1.0 - y);
    let dv = z + rho * (y - v);
    let lv = (1.0 - v).ln();
    let c = 1.0 + z * (1.0 + z / 2.0) / (1.0 - y) + rho * rho * (y - v) + v - (dv + v) * lv;
    let l = 1.0 + v + dv;
    let c_star = -y - (1.0 - y).ln() + z * (y + z / 2.0) / (1.0 - y) + (y + z).powi(2) * (y - v) / (1.0 - y).powi(2) + l;
    let w = 1.0 + z / (1.0 - y) + rho * ((1.0 - v) / (1.0 - y)).ln() - lv;
    Ok(ScenarioMetrics::new(c, c_star, w, l))
}

/// Floor and wall scenario without block.
pub fn basic_ratio_closed(y: f64, v: f64) -> Result<ScenarioMetrics> {
    closed_metrics(y, Some(v), None)
}

pub const QUAD_TOL: f64 = 1e-7;

/// The same quantities by numerical integration over the release profile.
pub fn profile_metrics(y: f64, v: Option<f64>, z: Option<f64>) -> Result<ScenarioMetrics> {
    let v = v.unwrap_or(y);
    let z = z.unwrap_or(0.0);
    check(y, v, z)?;
    let rho = (1.0 + z) / (1.0 - y);
    let backlog = rho - 1.0;
    let block_w = z / (1.0 - y);
    let tol = QUAD_TOL / 8.0;

    // WSRPT: block first after time 1, then wall from y down to v, then floor from v down to 0.
    let wall_done = 1.0 + z + rho * (y - v);
    let c_wall = integrate(|x| rho / (1.0 - x) * (1.0 + z + rho * (y - x)), v, y, tol);
    let c_floor = integrate(|x| (wall_done + v - x) / (1.0 - x), 0.0, v, tol);
    let c = 1.0 + block_w * (1.0 + z / 2.0) + c_wall + c_floor;

    // Optimum: unit-rate mass finishes at release, then block, backlog from y down, long job last.
    let l = 1.0 + v + rho * (y - v) + z;
    let at_release = integrate(|x| x / (1.0 - x), 0.0, y, tol);
    let opt_backlog = integrate(|x| backlog / (1.0 - x) * (y + z + backlog * (y - x)), v, y, tol);
    let c_star = at_release + block_w * (y + z / 2.0) + opt_backlog + l;

    let w = 1.0 + block_w + integrate(|x| rho / (1.0 - x), v, y, tol) + integrate(|x| 1.0 / (1.0 - x), 0.0, v, tol);
    Ok(ScenarioMetrics::new(c, c_star, w, l))
}

/// `-(1-x) ln(1-x) / (k x + c)`.
pub fn f_curve(x: f64, k: f64, c: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) || c <= 0.0 || k + c <= 0.0 {
        return Err(Error::Domain(format!("f_curve needs 0 <= x < 1, c > 0, k + c > 0 (x={x}, k={k}, c={c})")));
    }
    Ok(-(1.0 - x) * (1.0 - x).ln() / (k * x + c))
}

pub fn f_argmax(k: f64, c: f64) -> Result<f64> {
    f_curve(0.5, k, c)?;
    Ok(golden_max(|x| f_curve(x, k, c).unwrap_or(f64::NEG_INFINITY), 0.0, 1.0 - 1e-12, 1e-10).0)
}

/// Ratio of a group whose last job is released at `x`, given the
/// denominator of the last group.
pub fn group_ratio(x: f64, denominator: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) || denominator <= 0.0 {
        return Err(Error::Domain(format!("group_ratio needs 0 <= x < 1 and a positive denominator (x={x})")));
    }
    Ok(1.0 - (1.0 - x).ln() * (1.0 - x) / denominator)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BasicOptimum {
    pub y: f64,
    pub v: f64,
    pub ratio: f64,
}

pub const GRID: usize = 200;

/// Maximizes the floor and wall ratio over `0 < v <= y < 1`: a 200 x 200
/// grid then compass refinement to step 1e-6.
pub fn optimize_basic() -> BasicOptimum {
    let ratio = |y: f64, v: f64| -> Option<f64> {
        (y > 0.0 && y < 1.0 && v > 0.0 && v <= y).then(|| basic_ratio_closed(y, v).map(|m| m.ratio).ok()).flatten()
    };
    let h = 1.0 / GRID as f64;
    let mut best = ((h, h), f64::NEG_INFINITY);
    for i in 1..GRID {
        let y = i as f64 * h;
        for j in 1..=i {
            let v = j as f64 * h;
            if let Some(r) = ratio(y, v) {
                if r > best.1 {
                    best = ((y, v), r);
                }
            }
        }
    }
    let ((y, v), r) = compass_max(ratio, best.0, h, 1e-6);
    BasicOptimum { y, v, ratio: r }
}

/// Floor-only ratio maximized over `y` in `(0, y_max]`.
pub fn optimize_floor_only(y_max: f64) -> BasicOptimum {
    let (y, r) = golden_max(|y| closed_metrics(y, None, None).map(|m| m.ratio).unwrap_or(f64::NEG_INFINITY), 1e-9, y_max, 1e-9);
    BasicOptimum { y, v: y, ratio: r }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_only_rows() {
        let m = closed_metrics(0.1, None, None).unwrap();
        assert!((m.c - 1.1105).abs() < 1e-4 && (m.c_star - 1.1054).abs() < 1e-4);
        let half = basic_ratio_closed(0.5, 0.5).unwrap();
        assert!((half.ratio - 1.0906).abs() < 1e-4);
        assert!((half.l - 1.5).abs() < 1e-12);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for (y, v, z) in [(0.1, None, None), (0.8157, Some(0.7066), None), (0.75, Some(0.7062), Some(0.3623)), (0.3, None, Some(1.1384))] {
            let a = closed_metrics(y, v, z).unwrap();
            let b = profile_metrics(y, v, z).unwrap();
            for (p, q) in [(a.c, b.c), (a.c_star, b.c_star), (a.ratio, b.ratio), (a.w, b.w), (a.l, b.l)] {
                assert!((p - q).abs() < 1e-6, "{y} {v:?} {z:?}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn wall_identity() {
        let (y, v) = (0.8157, 0.7066);
        let m = basic_ratio_closed(y, v).unwrap();
        let dv = (y - v) / (1.0 - y);
        assert!((m.l - 1.0 - v - dv).abs() < 1e-12);
        assert!((m.l - (1.0 - v * y) / (1.0 - y)).abs() < 1e-12);
        assert!((dv - 0.5920).abs() < 1e-3);
    }

    #[test]
    fn f_curve_examples() {
        assert_eq!(f_curve(0.0, 1.0, 1.0).unwrap(), 0.0);
        let e = 1.0 - (-1.0f64).exp();
        assert!((f_argmax(0.0, 1.0).unwrap() - e).abs() < 1e-6);
        assert!(f_argmax(1.0, 1.0).unwrap() < e);
        assert!(f_argmax(-0.5, 1.0).unwrap() > e);
        assert!(f_curve(1.0, 0.0, 1.0).is_err());
        assert!(f_curve(0.5, -2.0, 1.0).is_err());
    }

    #[test]
    fn f_curve_concave() {
        for (k, c) in [(0.0, 1.0), (1.0, 1.0), (-0.5, 1.0), (1.08, 1.0)] {
            let f = |x: f64| f_curve(x, k, c).unwrap();
            let h = 1e-3;
            for i in 1..999 {
                let x = i as f64 * h;
                let second = f(x + h) - 2.0 * f(x) + f(x - h);
                assert!(second <= 1e-12, "k={k} x={x} {second}");
            }
        }
    }

    #[test]
    fn group_ratio_fixed_points() {
        assert_eq!(group_ratio(0.0, 1.0).unwrap(), 1.0);
        let opt = optimize_basic();
        let denom = 1.0 + (opt.y - opt.v) / (1.0 - opt.y);
        let g = group_ratio(opt.v, denom).unwrap();
        assert!((g - opt.ratio).abs() < 5e-4, "{g}");
        assert!((-(1.0 - 0.7066f64).ln() - 1.2259).abs() < 5e-4);
        assert!((1.0 / opt.y - opt.ratio).abs() < 5e-4);
    }

    #[test]
    fn optimum_is_concave_in_v() {
        let opt = optimize_basic();
        let r = |v: f64| basic_ratio_closed(opt.y, v).unwrap().ratio;
        let h = 1e-3;
        assert!(r(opt.v + h) - 2.0 * r(opt.v) + r(opt.v - h) < 0.0);
    }

    #[test]
    fn floor_only_ratio_increases_in_y() {
        let ys = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.92];
        let rs: Vec<f64> = ys.iter().map(|&y| closed_metrics(y, None, None).unwrap().ratio).collect();
        assert!(rs.windows(2).all(|w| w[0] < w[1]));
        assert!(optimize_floor_only(0.92).ratio >= rs[9] - 1e-12);
    }
}
