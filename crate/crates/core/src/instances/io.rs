use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Job, JobId, Tags, TieScript};
use crate::numeric::{serde_str, Rational};

#[derive(Serialize, Deserialize)]
struct RawJob {
    id: u64,
    #[serde(with = "serde_str")]
    r: Rational,
    #[serde(with = "serde_str")]
    p: Rational,
    #[serde(with = "serde_str")]
    w: Rational,
}

#[derive(Serialize, Deserialize)]
struct RawChoice {
    #[serde(with = "serde_str")]
    t: Rational,
    choice: u64,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    jobs: Vec<RawJob>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tie_script: Option<Vec<RawChoice>>,
    #[serde(default, skip_serializing_if = "Tags::is_empty")]
    tags: Tags,
}

/// Parses an instance. File ids may be any unique integers; they are
/// replaced by dense ids in file order, and the tie script follows.
pub fn instance_from_json(text: &str) -> Result<Instance> {
    let raw: RawInstance = serde_json::from_str(text)?;
    let mut dense: HashMap<u64, usize> = HashMap::new();
    let mut jobs = Vec::with_capacity(raw.jobs.len());
    for (i, j) in raw.jobs.into_iter().enumerate() {
        if dense.insert(j.id, i).is_some() {
            return Err(Error::DuplicateId(j.id));
        }
        jobs.push(Job::new(i, j.r, j.p, j.w)?);
    }
    let map = |id: u64| dense.get(&id).copied().map(JobId).ok_or(Error::UnknownJob(id as usize));
    let mut inst = Instance::new(jobs)?;
    if let Some(entries) = raw.tie_script {
        let mut script = TieScript::new();
        for e in entries {
            script.insert(e.t, map(e.choice)?);
        }
        inst.tie_script = Some(script);
    }
    let mut tags = raw.tags;
    tags.long_jobs = tags.long_jobs.iter().map(|id| map(id.0 as u64)).collect::<Result<_>>()?;
    inst.tags = tags;
    Ok(inst)
}

fn to_raw(instance: &Instance) -> RawInstance {
    RawInstance {
        jobs: instance
            .jobs()
            .iter()
            .map(|j| RawJob { id: j.id.0 as u64, r: j.release.clone(), p: j.processing.clone(), w: j.weight.clone() })
            .collect(),
        tie_script: instance.tie_script.as_ref().map(|s| {
            s.choices.iter().map(|(t, c)| RawChoice { t: t.clone(), choice: c.0 as u64 }).collect()
        }),
        tags: instance.tags.clone(),
    }
}

pub fn instance_to_json(instance: &Instance) -> Result<String> {
    Ok(serde_json::to_string_pretty(&to_raw(instance))?)
}

/// Serializes an instance in the file format, for embedding in reports.
pub fn serialize_instance<S: serde::Serializer>(instance: &Instance, s: S) -> std::result::Result<S::Ok, S::Error> {
    to_raw(instance).serialize(s)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    instance_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, instance_to_json(instance)?)?;
    Ok(())
}
