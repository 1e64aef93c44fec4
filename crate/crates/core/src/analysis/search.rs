//! Deterministic one- and two-dimensional maximizers and adaptive quadrature.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal `f` on `[a, b]` to interval width `tol`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Grid scan followed by golden refinement around the best cell.
pub fn scan_then_golden(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize, tol: f64) -> (f64, f64) {
    let h = (b - a) / cells as f64;
    let best = (0..=cells)
        .map(|i| a + h * i as f64)
        .map(|x| (x, f(x)))
        .fold((a, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
    let lo = (best.0 - h).max(a);
    let hi = (best.0 + h).min(b);
    let refined = golden_max(&f, lo, hi, tol);
    if refined.1 >= best.1 {
        refined
    } else {
        best
    }
}

/// Compass search from `start`, halving the step until it drops below `tol`.
/// `f` returns `None` outside the feasible region.
pub fn compass_max(f: impl Fn(f64, f64) -> Option<f64>, start: (f64, f64), step: f64, tol: f64) -> ((f64, f64), f64) {
    let mut x = start;
    let mut fx = f(x.0, x.1).expect("feasible start");
    let mut h = step;
    while h > tol {
        let mut moved = false;
        for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0)] {
            let cand = (x.0 + dx * h, x.1 + dy * h);
            if let Some(v) = f(cand.0, cand.1) {
                if v > fx {
                    x = cand;
                    fx = v;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    (x, fx)
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}
