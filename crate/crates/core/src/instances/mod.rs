//! Worst-case families, random instances and instance files.

mod io;
mod random;

use num_traits::{One, Signed, Zero};
use crate::error::{Error, Result};
use crate::model::{Instance, Job, JobId, Tags, TieScript};
use crate::numeric::{format_rational, from_f64, int, snap, Rational};

pub use io::{instance_from_json, instance_to_json, read_instance, serialize_instance, write_instance};
pub use random::{gen_random, JobClass, RandomRanges};

/// One long job (r=0, p=w=1) and small jobs released while it runs.
///
/// * floor: density 1 on `[0, v)`
/// * wall: density `(1+z)/(1-y)` on `(v, y]`
/// * block: length `z` at `y`
///
/// Every small job released at `x` has weight over length `1/(1-x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioParams {
    pub y: Rational,
    pub v: Option<Rational>,
    pub z: Option<Rational>,
    pub delta: Rational,
}

impl ScenarioParams {
    pub fn new(y: f64, v: Option<f64>, z: Option<f64>, delta: f64) -> Result<ScenarioParams> {
        Ok(ScenarioParams {
            y: from_f64(y)?,
            v: v.map(from_f64).transpose()?,
            z: z.map(from_f64).transpose()?,
            delta: from_f64(delta)?,
        })
    }

    pub fn floor_only(y: f64, delta: f64) -> Result<ScenarioParams> {
        ScenarioParams::new(y, None, None, delta)
    }
}

/// Small jobs of a basic scenario as `(release, processing, weight)`.
struct Layout {
    y: Rational,
    v: Rational,
    z: Rational,
    small: Vec<(Rational, Rational, Rational)>,
    warnings: Vec<String>,
}

impl Layout {
    fn small_length(&self) -> Rational {
        self.small.iter().map(|(_, p, _)| p).sum()
    }
}

fn layout(params: &ScenarioParams) -> Result<Layout> {
    let d = &params.delta;
    if !d.is_positive() {
        return Err(Error::Domain("delta must be positive".into()));
    }
    let one = Rational::one();
    let mut warnings = Vec::new();
    let y = snap(&params.y, d);
    if y != params.y {
        warnings.push(format!("y snapped from {} to {}", format_rational(&params.y), format_rational(&y)));
    }
    if !y.is_positive() || y >= one {
        return Err(Error::Domain(format!("y must lie in (0,1), got {}", format_rational(&y))));
    }
    let v = match &params.v {
        Some(v) => {
            let s = snap(v, d);
            if s != *v {
                warnings.push(format!("v snapped from {} to {}", format_rational(v), format_rational(&s)));
            }
            if s.is_negative() || s > y {
                return Err(Error::Domain("v must lie in [0, y]".into()));
            }
            s
        }
        None => y.clone(),
    };
    let z = params.z.clone().unwrap_or_else(Rational::zero);
    if z.is_negative() {
        return Err(Error::Domain("z must be nonnegative".into()));
    }

    let mut small = Vec::new();
    let mut x = Rational::zero();
    while x < v {
        small.push((x.clone(), d.clone(), d / (&one - &x)));
        x += d;
    }
    if v < y {
        let density = (&one + &z) / (&one - &y);
        let pieces = density.ceil();
        let piece = d * &density / &pieces;
        let count: usize = pieces.to_integer().try_into().map_err(|_| Error::Domain("wall too dense".into()))?;
        let mut x = &v + d;
        while x <= y {
            for _ in 0..count {
                small.push((x.clone(), piece.clone(), &piece / (&one - &x)));
            }
            x += d;
        }
    }
    let mut left = z.clone();
    while left.is_positive() {
        let p = if &left < d { left.clone() } else { d.clone() };
        small.push((y.clone(), p.clone(), &p / (&one - &y)));
        left -= p;
    }
    Ok(Layout { y, v, z, small, warnings })
}

/// Stable order by release, then decreasing weight over processing.
fn assemble(triples: Vec<(Rational, Rational, Rational)>) -> Result<(Instance, Vec<usize>)> {
    let mut idx: Vec<usize> = (0..triples.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ra, pa, wa) = &triples[a];
        let (rb, pb, wb) = &triples[b];
        ra.cmp(rb).then_with(|| (wb / pb).cmp(&(wa / pa)))
    });
    let mut new_id = vec![0; triples.len()];
    let mut jobs = Vec::with_capacity(triples.len());
    for (pos, &i) in idx.iter().enumerate() {
        new_id[i] = pos;
        let (r, p, w) = triples[i].clone();
        jobs.push(Job::new(pos, r, p, w)?);
    }
    Ok((Instance::new(jobs)?, new_id))
}

/// Basic scenario with a tie script in which the long job wins every tie.
pub fn gen_basic(params: &ScenarioParams) -> Result<Instance> {
    let lay = layout(params)?;
    let mut triples = vec![(int(0), int(1), int(1))];
    triples.extend(lay.small.iter().cloned());
    let (mut inst, ids) = assemble(triples)?;
    let long = JobId(ids[0]);
    let mut script = TieScript::new();
    for t in inst.release_times() {
        script.insert(t, long);
    }
    inst.tie_script = Some(script);
    inst.tags = Tags {
        kind: Some("basic".into()),
        long_jobs: vec![long],
        params: [
            ("y", format_rational(&lay.y)),
            ("v", format_rational(&lay.v)),
            ("z", format_rational(&lay.z)),
            ("delta", format_rational(&params.delta)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect(),
        warnings: lay.warnings,
    };
    Ok(inst)
}

/// An outer basic scenario with a scaled copy of `inner` released at `r_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedParams {
    pub outer: ScenarioParams,
    pub r_s: Rational,
    pub p_s: Rational,
    pub inner: ScenarioParams,
}

impl NestedParams {
    /// Outer floor up to `r_s`, inner scenario `(inner_y, inner_v)`, one grid step for both.
    pub fn standard(r_s: f64, p_s: f64, inner_y: f64, inner_v: Option<f64>, delta: f64) -> Result<NestedParams> {
        let d = from_f64(delta)?;
        let r = snap(&from_f64(r_s)?, &d);
        Ok(NestedParams {
            outer: ScenarioParams { y: r.clone(), v: None, z: None, delta: d.clone() },
            r_s: r,
            p_s: from_f64(p_s)?,
            inner: ScenarioParams::new(inner_y, inner_v, None, delta)?,
        })
    }
}

/// Nested scenario. Its tie script lets the outer long job win the outer
/// ties, the inner long job win its release tie at `r_s` and all inner ties,
/// and the inner first floor job win against the outer long job.
pub fn gen_nested(params: &NestedParams) -> Result<Instance> {
    let one = Rational::one();
    let r_s = &params.r_s;
    let p_s = &params.p_s;
    if !r_s.is_positive() || r_s >= &one {
        return Err(Error::Precondition("r_s must lie in (0,1)".into()));
    }
    if !p_s.is_positive() {
        return Err(Error::Precondition("p_s must be positive".into()));
    }
    let outer = layout(&params.outer)?;
    let inner = layout(&params.inner)?;
    let outer_last = outer.small.iter().map(|(r, _, _)| r).max();
    if outer_last.is_some_and(|r| r >= r_s) || outer.y > *r_s {
        return Err(Error::Precondition("outer small jobs must be released before r_s".into()));
    }
    let l_s = &one + inner.small_length();
    let bound = &outer.y * (&one - &outer.v) / (&one - &outer.y);
    if r_s + p_s * &l_s < bound {
        return Err(Error::Precondition("inner segment ends before the outer backlog threshold".into()));
    }

    let scale_w = p_s / (&one - r_s);
    let mut triples = vec![(int(0), int(1), int(1))];
    triples.extend(outer.small.iter().cloned());
    let inner_long = triples.len();
    triples.push((r_s.clone(), p_s.clone(), scale_w.clone()));
    let inner_first = triples.len();
    for (r, p, w) in &inner.small {
        triples.push((r_s + p_s * r, p_s * p, &scale_w * w));
    }
    let (mut inst, ids) = assemble(triples)?;
    let j_b = JobId(ids[0]);
    let j_s = JobId(ids[inner_long]);

    let mut script = TieScript::new();
    for (r, _, _) in &outer.small {
        script.insert(r.clone(), j_b);
    }
    for (r, _, _) in &inner.small {
        script.insert(r_s + p_s * r, j_s);
    }
    script.insert(r_s.clone(), j_s);
    let floor_zero = inner.small.iter().position(|(r, _, _)| r.is_zero());
    if let Some(k) = floor_zero {
        let last_start = r_s + p_s * (&l_s - &inner.small[k].1);
        script.insert(last_start, JobId(ids[inner_first + k]));
    }
    inst.tie_script = Some(script);

    let mut warnings = outer.warnings;
    warnings.extend(inner.warnings.into_iter().map(|w| format!("inner {w}")));
    inst.tags = Tags {
        kind: Some("nested".into()),
        long_jobs: vec![j_b, j_s],
        params: [
            ("r_s", format_rational(r_s)),
            ("p_s", format_rational(p_s)),
            ("outer_y", format_rational(&outer.y)),
            ("outer_v", format_rational(&outer.v)),
            ("outer_z", format_rational(&outer.z)),
            ("inner_y", format_rational(&inner.y)),
            ("inner_v", format_rational(&inner.v)),
            ("inner_z", format_rational(&inner.z)),
            ("delta", format_rational(&params.inner.delta)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect(),
        warnings,
    };
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;
    use crate::simulator::{default_tie, is_equality_instance};

    #[test]
    fn floor_only_layout() {
        let inst = gen_basic(&ScenarioParams::floor_only(0.5, 0.125).unwrap()).unwrap();
        assert_eq!(inst.len(), 5);
        assert_eq!(inst.jobs()[0].processing, int(1));
        assert_eq!(inst.jobs()[1].weight, ratio(1, 8));
        assert_eq!(inst.jobs()[4].release, ratio(3, 8));
        assert_eq!(inst.jobs()[4].weight, ratio(1, 5));
        assert!(inst.tags.warnings.is_empty());
    }

    #[test]
    fn wall_and_block_mass() {
        let p = ScenarioParams::new(0.5, Some(0.25), Some(0.3), 0.125).unwrap();
        let inst = gen_basic(&p).unwrap();
        // floor 1/4, wall (1+z)/(1-y)*(y-v) = 13/20, block 3/10
        let small: Rational = inst.jobs()[1..].iter().map(|j| &j.processing).sum();
        assert_eq!(small, ratio(1, 4) + ratio(13, 20) + ratio(3, 10));
        assert!(inst.jobs()[1..].iter().all(|j| j.processing <= ratio(1, 8)));
        assert!(is_equality_instance(&inst, &default_tie(&inst)).unwrap().pass);
    }

    #[test]
    fn snapping_is_reported() {
        let inst = gen_basic(&ScenarioParams::new(0.8157, Some(0.7066), None, 0.01).unwrap()).unwrap();
        assert_eq!(inst.tags.params["y"], "41/50");
        assert_eq!(inst.tags.params["v"], "71/100");
        assert_eq!(inst.tags.warnings.len(), 2);
    }

    #[test]
    fn bad_params() {
        assert!(gen_basic(&ScenarioParams::floor_only(1.0, 0.1).unwrap()).is_err());
        assert!(gen_basic(&ScenarioParams::new(0.5, Some(0.7), None, 0.1).unwrap()).is_err());
        assert!(gen_basic(&ScenarioParams::floor_only(0.5, 0.0).unwrap()).is_err());
    }

    #[test]
    fn nested_has_two_long_jobs() {
        let p = NestedParams::standard(0.5, 2.0, 0.5, Some(0.25), 0.125).unwrap();
        let inst = gen_nested(&p).unwrap();
        assert_eq!(inst.tags.long_jobs.len(), 2);
        assert!(is_equality_instance(&inst, &default_tie(&inst)).unwrap().pass);
    }

    #[test]
    fn nested_precondition() {
        let mut p = NestedParams::standard(0.5, 2.0, 0.5, None, 0.125).unwrap();
        p.outer = ScenarioParams::new(0.75, Some(0.25), None, 0.125).unwrap();
        assert!(gen_nested(&p).is_err());
    }
}
