use crate::error::{Error, Result};
use crate::model::{Instance, Job, JobId, TieScript};
use crate::numeric::Rational;

/// Replaces `job` by `q` copies with processing and weight divided by `q`.
/// Copies take the job's position; later ids shift by `q - 1`.
pub fn split_job(instance: &Instance, job: JobId, q: usize) -> Result<Instance> {
    if q == 0 {
        return Err(Error::Precondition("q must be at least 1".into()));
    }
    let target = instance.job(job)?;
    let qr = Rational::from_integer(q.into());
    let relabel = |id: JobId| if id.0 > job.0 { JobId(id.0 + q - 1) } else { id };
    let mut jobs = Vec::with_capacity(instance.len() + q - 1);
    for j in instance.jobs() {
        if j.id == job {
            for _ in 0..q {
                jobs.push(Job::new(jobs.len(), target.release.clone(), &target.processing / &qr, &target.weight / &qr)?);
            }
        } else {
            jobs.push(Job::new(jobs.len(), j.release.clone(), j.processing.clone(), j.weight.clone())?);
        }
    }
    let mut out = Instance::new(jobs)?;
    out.tags = instance.tags.clone();
    out.tags.long_jobs = instance.tags.long_jobs.iter().map(|&id| relabel(id)).collect();
    out.tie_script = instance.tie_script.as_ref().map(|s| {
        let mut t = TieScript::new();
        for (time, c) in &s.choices {
            t.insert(time.clone(), relabel(*c));
        }
        t
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::objective;
    use crate::numeric::{int, ratio};
    use crate::simulator::{simulate, Priority, TieRule};

    #[test]
    fn q_one_is_identity() {
        let inst = Instance::from_triples(vec![(int(0), int(1), int(1)), (int(1), int(2), int(3))]).unwrap();
        assert_eq!(split_job(&inst, JobId(0), 1).unwrap(), inst);
    }

    #[test]
    fn halving_saves_quarter() {
        let inst = Instance::from_triples(vec![(int(0), int(1), int(1))]).unwrap();
        let split = split_job(&inst, JobId(0), 2).unwrap();
        assert_eq!(split.len(), 2);
        assert_eq!(split.jobs()[1].processing, ratio(1, 2));
        let before = objective(&simulate(&inst, Priority::Wsrpt, &TieRule::PreferRunning).unwrap(), &inst).unwrap();
        let after = objective(&simulate(&split, Priority::Wsrpt, &TieRule::PreferRunning).unwrap(), &split).unwrap();
        assert_eq!(before - after, ratio(1, 4));
    }

    #[test]
    fn unknown_job() {
        let inst = Instance::from_triples(vec![(int(0), int(1), int(1))]).unwrap();
        assert!(matches!(split_job(&inst, JobId(3), 2), Err(Error::UnknownJob(3))));
    }
}
