use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, serde_str, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JobId(pub usize);

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Job {
    pub id: JobId,
    pub release: Rational,
    pub processing: Rational,
    pub weight: Rational,
}

impl Job {
    pub fn new(id: usize, release: Rational, processing: Rational, weight: Rational) -> Result<Job> {
        let bad = |reason: &str| Error::InvalidJob { id, reason: reason.to_string() };
        if release.is_negative() {
            return Err(bad("negative release"));
        }
        if !processing.is_positive() {
            return Err(bad("processing time must be positive"));
        }
        if weight.is_negative() {
            return Err(bad("negative weight"));
        }
        Ok(Job { id: JobId(id), release, processing, weight })
    }

    /// Weight over original processing time.
    pub fn density(&self) -> Rational {
        &self.weight / &self.processing
    }
}

/// Weight over remaining processing time.
pub fn smith_ratio(job: &Job, remaining: &Rational) -> Result<Rational> {
    if !remaining.is_positive() {
        return Err(Error::NonPositiveRemaining);
    }
    if remaining > &job.processing {
        return Err(Error::InvalidJob {
            id: job.id.0,
            reason: "remaining exceeds processing".into(),
        });
    }
    Ok(&job.weight / remaining)
}

/// Tie choices keyed by decision time.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TieScript {
    pub choices: BTreeMap<Rational, JobId>,
}

impl TieScript {
    pub fn new() -> TieScript {
        TieScript::default()
    }

    pub fn insert(&mut self, t: Rational, choice: JobId) {
        self.choices.insert(t, choice);
    }

    pub fn get(&self, t: &Rational) -> Option<JobId> {
        self.choices.get(t).copied()
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }
}

/// Metadata attached by the generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tags {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub long_jobs: Vec<JobId>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Tags {
    pub fn is_empty(&self) -> bool {
        self.kind.is_none() && self.long_jobs.is_empty() && self.params.is_empty() && self.warnings.is_empty()
    }
}

/// Jobs with dense ids `0..n` in storage order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    jobs: Vec<Job>,
    pub tie_script: Option<TieScript>,
    pub tags: Tags,
}

impl Instance {
    pub fn new(jobs: Vec<Job>) -> Result<Instance> {
        if jobs.is_empty() {
            return Err(Error::EmptyInstance);
        }
        for (i, j) in jobs.iter().enumerate() {
            if j.id.0 != i {
                return Err(Error::InvalidJob { id: j.id.0, reason: format!("expected dense id {i}") });
            }
        }
        Ok(Instance { jobs, tie_script: None, tags: Tags::default() })
    }

    /// Builds jobs from `(release, processing, weight)` triples.
    pub fn from_triples(triples: Vec<(Rational, Rational, Rational)>) -> Result<Instance> {
        let jobs = triples
            .into_iter()
            .enumerate()
            .map(|(i, (r, p, w))| Job::new(i, r, p, w))
            .collect::<Result<Vec<_>>>()?;
        Instance::new(jobs)
    }

    pub fn with_script(mut self, script: TieScript) -> Instance {
        self.tie_script = Some(script);
        self
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: JobId) -> Result<&Job> {
        self.jobs.get(id.0).ok_or(Error::UnknownJob(id.0))
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn total_processing(&self) -> Rational {
        self.jobs.iter().map(|j| &j.processing).sum()
    }

    /// Sum of `w (r + p)`, a lower bound on every objective.
    pub fn trivial_bound(&self) -> Rational {
        self.jobs.iter().map(|j| &j.weight * (&j.release + &j.processing)).sum()
    }

    /// Distinct release times, ascending.
    pub fn release_times(&self) -> Vec<Rational> {
        let mut ts: Vec<Rational> = self.jobs.iter().map(|j| j.release.clone()).collect();
        ts.sort();
        ts.dedup();
        ts
    }
}

/// Shifts all releases (and script times) so the earliest release is 0.
pub fn normalize_releases(instance: &Instance) -> Instance {
    let min = instance.jobs.iter().map(|j| &j.release).min().cloned().unwrap_or_else(Rational::zero);
    if min.is_zero() {
        return instance.clone();
    }
    let mut out = instance.clone();
    for j in &mut out.jobs {
        j.release -= &min;
    }
    if let Some(script) = &instance.tie_script {
        let mut shifted = TieScript::new();
        for (t, c) in &script.choices {
            shifted.insert(t - &min, *c);
        }
        out.tie_script = Some(shifted);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slice {
    pub job: JobId,
    #[serde(with = "serde_str")]
    pub start: Rational,
    #[serde(with = "serde_str")]
    pub end: Rational,
}

impl Slice {
    pub fn len(&self) -> Rational {
        &self.end - &self.start
    }

    /// Ordering key used when comparing slice lists lexicographically.
    pub fn sort_key(&self) -> (&Rational, JobId, &Rational) {
        (&self.start, self.job, &self.end)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub slices: Vec<Slice>,
}

impl Schedule {
    pub fn new(slices: Vec<Slice>) -> Schedule {
        Schedule { slices }
    }

    /// Appends a slice, merging it into the previous one when contiguous.
    pub fn push(&mut self, job: JobId, start: Rational, end: Rational) {
        if let Some(last) = self.slices.last_mut() {
            if last.job == job && last.end == start {
                last.end = end;
                return;
            }
        }
        self.slices.push(Slice { job, start, end });
    }

    pub fn completion(&self, job: JobId) -> Option<&Rational> {
        self.slices.iter().rev().find(|s| s.job == job).map(|s| &s.end)
    }

    pub fn completions(&self, n: usize) -> Vec<Option<Rational>> {
        let mut out = vec![None; n];
        for s in &self.slices {
            if let Some(slot) = out.get_mut(s.job.0) {
                *slot = Some(s.end.clone());
            }
        }
        out
    }

    /// Work done on `job` before time `t`.
    pub fn executed(&self, job: JobId, t: &Rational) -> Rational {
        let mut total = Rational::zero();
        for s in self.slices.iter().filter(|s| s.job == job && &s.start < t) {
            total += if &s.end <= t { s.len() } else { t - &s.start };
        }
        total
    }

    pub fn remaining(&self, instance: &Instance, job: JobId, t: &Rational) -> Result<Rational> {
        Ok(&instance.job(job)?.processing - self.executed(job, t))
    }

    pub fn makespan(&self) -> Option<&Rational> {
        self.slices.last().map(|s| &s.end)
    }

    /// Checks feasibility against `instance`.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        let mism = |m: String| Err(Error::ScheduleMismatch(m));
        let mut work = vec![Rational::zero(); instance.len()];
        let mut prev_end: Option<&Rational> = None;
        for s in &self.slices {
            let Some(job) = instance.jobs.get(s.job.0) else {
                return mism(format!("slice for unknown job {}", s.job));
            };
            if s.start >= s.end {
                return mism(format!("empty slice for {}", s.job));
            }
            if s.start < job.release {
                return mism(format!("{} runs before its release", s.job));
            }
            if let Some(p) = prev_end {
                if &s.start < p {
                    return mism(format!("overlapping slices at {}", format_rational(&s.start)));
                }
            }
            prev_end = Some(&s.end);
            work[s.job.0] += s.len();
        }
        for (j, w) in instance.jobs.iter().zip(&work) {
            if w != &j.processing {
                return mism(format!(
                    "{} executes {} of {}",
                    j.id,
                    format_rational(w),
                    format_rational(&j.processing)
                ));
            }
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.slices)?;
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["job", "start", "end"])?;
        for s in &self.slices {
            out.write_record([s.job.0.to_string(), format_rational(&s.start), format_rational(&s.end)])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Total weighted completion time.
pub fn objective(schedule: &Schedule, instance: &Instance) -> Result<Rational> {
    schedule.validate(instance)?;
    let completions = schedule.completions(instance.len());
    let mut total = Rational::zero();
    for (job, c) in instance.jobs.iter().zip(completions) {
        let c = c.ok_or_else(|| Error::ScheduleMismatch(format!("{} never runs", job.id)))?;
        total += &job.weight * c;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, ratio};

    fn two_jobs() -> Instance {
        Instance::from_triples(vec![(int(0), int(1), int(1)), (int(0), int(2), int(2))]).unwrap()
    }

    #[test]
    fn single_job_objective() {
        let inst = Instance::from_triples(vec![(int(0), int(1), int(1))]).unwrap();
        let s = Schedule::new(vec![Slice { job: JobId(0), start: int(0), end: int(1) }]);
        assert_eq!(objective(&s, &inst).unwrap(), int(1));
    }

    #[test]
    fn id_order_objective() {
        let mut s = Schedule::default();
        s.push(JobId(0), int(0), int(1));
        s.push(JobId(1), int(1), int(3));
        assert_eq!(objective(&s, &two_jobs()).unwrap(), int(7));
    }

    #[test]
    fn objective_rejects_mismatch() {
        let mut s = Schedule::default();
        s.push(JobId(0), int(0), int(1));
        assert!(matches!(objective(&s, &two_jobs()), Err(Error::ScheduleMismatch(_))));
        s.push(JobId(1), int(1), int(2));
        assert!(objective(&s, &two_jobs()).is_err());
        let mut bad = Schedule::default();
        bad.push(JobId(0), int(0), int(1));
        bad.push(JobId(1), ratio(1, 2), ratio(5, 2));
        assert!(objective(&bad, &two_jobs()).is_err());
    }

    #[test]
    fn push_merges_contiguous() {
        let mut s = Schedule::default();
        s.push(JobId(0), int(0), int(1));
        s.push(JobId(0), int(1), int(2));
        s.push(JobId(1), int(2), int(3));
        assert_eq!(s.slices.len(), 2);
        assert_eq!(s.executed(JobId(0), &ratio(3, 2)), ratio(3, 2));
    }

    #[test]
    fn smith_ratio_examples() {
        let long = Job::new(0, int(0), int(1), int(1)).unwrap();
        assert_eq!(smith_ratio(&long, &int(1)).unwrap(), int(1));
        let rem = int(1) - ratio(5307, 10000);
        assert_eq!(smith_ratio(&long, &rem).unwrap(), ratio(10000, 4693));
        let d = ratio(1, 1000);
        let r = ratio(3, 10);
        let small = Job::new(1, r.clone(), d.clone(), &d / (int(1) - &r)).unwrap();
        assert_eq!(smith_ratio(&small, &d).unwrap(), int(1) / (int(1) - r));
        assert!(matches!(smith_ratio(&long, &int(0)), Err(Error::NonPositiveRemaining)));
    }

    #[test]
    fn normalize_examples() {
        let inst = Instance::from_triples(vec![(int(2), int(1), int(1)), (int(3), int(1), int(1))]).unwrap();
        let n = normalize_releases(&inst);
        assert_eq!(n.jobs()[0].release, int(0));
        assert_eq!(n.jobs()[1].release, int(1));
        let one = Instance::from_triples(vec![(ratio(1, 2), int(1), int(1))]).unwrap();
        assert_eq!(normalize_releases(&one).jobs()[0].release, int(0));
        assert_eq!(normalize_releases(&two_jobs()), two_jobs());
    }

    #[test]
    fn invalid_jobs_rejected() {
        assert!(Job::new(0, int(-1), int(1), int(1)).is_err());
        assert!(Job::new(0, int(0), int(0), int(1)).is_err());
        assert!(Job::new(0, int(0), int(1), int(-1)).is_err());
        assert!(matches!(Instance::new(vec![]), Err(Error::EmptyInstance)));
    }

    #[test]
    fn csv_export() {
        let mut s = Schedule::default();
        s.push(JobId(0), int(0), ratio(1, 2));
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "job,start,end\n0,0,1/2\n");
    }
}
