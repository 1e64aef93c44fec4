//! Outer floor-only scenario up to `r_s` with a scaled inner scenario
//! released at `r_s` (inner long job p = p_s, w = p_s/(1-r_s)).

use serde::Serialize;

use crate::error::{Error, Result};

use super::profile::ScenarioMetrics;
use super::search::{golden_max, scan_then_golden};

/// Ratio of the nested scenario given the unscaled inner metrics.
pub fn nested_ratio(r_s: f64, p_s: f64, inner: &ScenarioMetrics) -> Result<f64> {
    if !(r_s > 0.0 && r_s < 1.0) || p_s.is_nan() || p_s <= 0.0 {
        return Err(Error::Domain(format!("need 0 < r_s < 1 and p_s > 0 (r_s={r_s}, p_s={p_s})")));
    }
    let w_s = p_s / (1.0 - r_s);
    let g = 1.0 - (1.0 - r_s).ln();
    let shared = r_s * w_s * inner.w;
    let num = 1.0 + r_s * g + w_s * p_s * inner.c + shared + p_s * inner.l * g;
    let den = g + w_s * p_s * inner.c_star + shared + p_s * inner.l;
    Ok(num / den)
}

/// Value as the inner scenario vanishes.
pub fn nested_ratio_limit(r_s: f64) -> f64 {
    let g = 1.0 - (1.0 - r_s).ln();
    (1.0 + r_s * g) / g
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NestedOptimum {
    pub r_s: f64,
    pub p_s: f64,
    pub ratio: f64,
}

/// Best inner scale for fixed `r_s`, searched over `p_s` in `[1e-2, 1e4]`.
pub fn optimize_p_s(r_s: f64, inner: &ScenarioMetrics) -> NestedOptimum {
    let f = |lp: f64| nested_ratio(r_s, lp.exp(), inner).unwrap_or(f64::NEG_INFINITY);
    let (lp, ratio) = scan_then_golden(f, (1e-2f64).ln(), (1e4f64).ln(), 400, 1e-9);
    NestedOptimum { r_s, p_s: lp.exp(), ratio }
}

/// Best `(r_s, p_s)` for the given inner scenario.
pub fn optimize_nested(inner: &ScenarioMetrics) -> NestedOptimum {
    let (r_s, _) = golden_max(|r| optimize_p_s(r, inner).ratio, 0.3, 0.8, 1e-6);
    optimize_p_s(r_s, inner)
}

/// Upper envelope an inner segment with weight-over-length `wl` can reach
/// when nothing of the outer scenario follows it.
pub fn segment_envelope(r_s: f64, wl: f64) -> Result<f64> {
    if !(r_s > 0.0 && r_s < 1.0) || wl <= 0.0 {
        return Err(Error::Domain(format!("need 0 < r_s < 1 and a positive ratio (r_s={r_s})")));
    }
    Ok(1.0 - (1.0 - r_s) * (1.0 - r_s).ln() / (r_s * wl + (1.0 - r_s)))
}
