//! Floating-point analysis of the continuous worst cases.

mod lower_bound;
mod nested;
mod profile;
mod search;
mod table1;

pub use lower_bound::{
    l1, l2, lb_c1, lb_c2, lb_curves, lb_intersection, middle_bound_early, middle_bound_late, optimize_lb, LbPoint,
};
pub use nested::{nested_ratio, nested_ratio_limit, optimize_nested, optimize_p_s, segment_envelope, NestedOptimum};
pub use profile::{
    basic_ratio_closed, closed_metrics, f_argmax, f_curve, group_ratio, optimize_basic, optimize_floor_only,
    profile_metrics, BasicOptimum, ScenarioMetrics,
};
pub use search::{compass_max, golden_max, integrate, scan_then_golden};
pub use table1::{table1, Table1Row, TABLE1};
