use serde::Serialize;

use crate::model::{Instance, JobId, Schedule};
use crate::numeric::{serde_str, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    #[serde(with = "serde_str")]
    pub start: Rational,
    #[serde(with = "serde_str")]
    pub end: Rational,
    pub opener: JobId,
    pub members: Vec<JobId>,
    pub depth: usize,
    pub children: Vec<Segment>,
}

impl Segment {
    /// This segment and all descendants, preorder.
    pub fn flatten(&self) -> Vec<&Segment> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.flatten());
        }
        out
    }
}

/// Segment forest of a schedule.
///
/// A segment opens where a job starts exactly at its release. It closes at the
/// first slice of a job outside the opening set whose weight-over-processing
/// ratio is not larger than the opener's, or at the end of the busy period.
/// The opening set is the opener plus co-released jobs of equal ratio.
pub fn segments(schedule: &Schedule, instance: &Instance) -> Vec<Segment> {
    let jobs = instance.jobs();
    let slices = &schedule.slices;
    let mut busy_end: Vec<Rational> = vec![Rational::default(); slices.len()];
    for i in (0..slices.len()).rev() {
        busy_end[i] = match slices.get(i + 1) {
            Some(next) if next.start == slices[i].end => busy_end[i + 1].clone(),
            _ => slices[i].end.clone(),
        };
    }

    let mut flat: Vec<Segment> = Vec::new();
    for (i, s) in slices.iter().enumerate() {
        let opener = &jobs[s.job.0];
        let first_slice = slices.iter().position(|x| x.job == s.job) == Some(i);
        if !first_slice || s.start != opener.release {
            continue;
        }
        let ratio = opener.density();
        let opening: Vec<JobId> = jobs
            .iter()
            .filter(|j| j.release == opener.release && j.density() == ratio)
            .map(|j| j.id)
            .collect();
        let mut end = busy_end[i].clone();
        for (k, other) in slices.iter().enumerate().skip(i + 1) {
            if other.start != slices[k - 1].end {
                break;
            }
            if !opening.contains(&other.job) && jobs[other.job.0].density() <= ratio {
                end = other.start.clone();
                break;
            }
        }
        let start = s.start.clone();
        let mut members: Vec<JobId> = jobs
            .iter()
            .filter(|j| {
                let mine: Vec<_> = slices.iter().filter(|x| x.job == j.id).collect();
                !mine.is_empty() && mine.iter().all(|x| x.start >= start && x.end <= end)
            })
            .map(|j| j.id)
            .collect();
        members.sort();
        flat.push(Segment { start, end, opener: s.job, members, depth: 0, children: Vec::new() });
    }

    flat.sort_by(|a, b| a.start.cmp(&b.start).then(b.end.cmp(&a.end)));
    let mut roots: Vec<Segment> = Vec::new();
    for seg in flat {
        insert(&mut roots, seg, 0);
    }
    roots
}

fn insert(level: &mut Vec<Segment>, mut seg: Segment, depth: usize) {
    if let Some(parent) = level.last_mut() {
        if parent.start <= seg.start && seg.end <= parent.end {
            insert(&mut parent.children, seg, depth + 1);
            return;
        }
    }
    seg.depth = depth;
    level.push(seg);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::int;
    use crate::simulator::{simulate, Priority, TieRule};

    #[test]
    fn single_job_one_segment() {
        let inst = Instance::from_triples(vec![(int(0), int(2), int(1))]).unwrap();
        let s = simulate(&inst, Priority::Wsrpt, &TieRule::PreferRunning).unwrap();
        let segs = segments(&s, &inst);
        assert_eq!(segs.len(), 1);
        assert_eq!((segs[0].start.clone(), segs[0].end.clone()), (int(0), int(2)));
    }

    #[test]
    fn preempting_job_opens_nested_segment() {
        let inst = Instance::from_triples(vec![(int(0), int(2), int(1)), (int(1), int(1), int(9))]).unwrap();
        let s = simulate(&inst, Priority::Wsrpt, &TieRule::PreferRunning).unwrap();
        let segs = segments(&s, &inst);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].children.len(), 1);
        let inner = &segs[0].children[0];
        assert_eq!((inner.start.clone(), inner.end.clone(), inner.depth), (int(1), int(2), 1));
        assert_eq!(inner.members, vec![JobId(1)]);
    }
}
