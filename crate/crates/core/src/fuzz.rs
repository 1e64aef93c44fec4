//! Random search for instances where worst-case WSRPT tie-breaking is far
//! from optimal.

use std::hash::{DefaultHasher, Hash, Hasher};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instances::{gen_random, instance_to_json, read_instance, write_instance, JobClass, RandomRanges};
use crate::model::{objective, Instance};
use crate::numeric::{format_rational, to_f64, Rational};
use crate::oracle::optimal_bruteforce;
use crate::simulator::{simulate_worst, Priority, DEFAULT_BRANCH_BUDGET};

/// Largest instance the brute-force oracle is asked to solve here.
pub const MAX_FUZZ_N: usize = 8;

pub const CLASSES: [JobClass; 3] = [JobClass::UnitWeight, JobClass::ZeroRelease, JobClass::General];

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub trials: usize,
    pub n_max: usize,
    pub seed: u64,
    pub ranges: RandomRanges,
    /// Where the worst instance is written.
    pub certificate_dir: Option<PathBuf>,
    /// Ratio that must never be exceeded.
    pub envelope: f64,
}

impl Default for FuzzConfig {
    fn default() -> FuzzConfig {
        FuzzConfig {
            trials: 1000,
            n_max: 7,
            seed: 0,
            ranges: RandomRanges::default(),
            certificate_dir: None,
            envelope: 1.2259 + 1e-6,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassStats {
    pub class: JobClass,
    pub trials: usize,
    pub skipped: usize,
    /// Trials whose ratio is exactly 1.
    pub exact_ones: usize,
    pub max_ratio: f64,
    pub max_ratio_exact: String,
    pub mean_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzReport {
    pub trials: usize,
    pub seed: u64,
    pub n_max: usize,
    pub worst_ratio: f64,
    pub worst_ratio_exact: String,
    pub worst_class: Option<JobClass>,
    pub certificate: Option<PathBuf>,
    pub envelope: f64,
    pub breached: bool,
    pub classes: Vec<ClassStats>,
}

struct Trial {
    class: JobClass,
    /// None when the tie search ran out of budget.
    ratio: Option<Rational>,
    hash: u64,
    instance: Instance,
}

fn trial_seed(seed: u64, index: usize) -> u64 {
    let mut h = DefaultHasher::new();
    (seed, index as u64).hash(&mut h);
    h.finish()
}

fn run_trial(config: &FuzzConfig, index: usize) -> Result<Trial> {
    let class = CLASSES[index % CLASSES.len()];
    let s = trial_seed(config.seed, index);
    let n = 1 + (s % config.n_max as u64) as usize;
    let instance = gen_random(n, s, &config.ranges.with_class(class))?;
    let json = instance_to_json(&instance)?;
    let mut h = DefaultHasher::new();
    json.hash(&mut h);
    let ratio = performance_ratio(&instance).map(Some).or_else(|e| match e {
        Error::BudgetExceeded(_) => Ok(None),
        e => Err(e),
    })?;
    Ok(Trial { class, ratio, hash: h.finish(), instance })
}

/// Worst tie-breaking WSRPT objective over the optimum.
pub fn performance_ratio(instance: &Instance) -> Result<Rational> {
    let (schedule, _) = simulate_worst(instance, Priority::Wsrpt, DEFAULT_BRANCH_BUDGET)?;
    let online = objective(&schedule, instance)?;
    let opt = optimal_bruteforce(instance, MAX_FUZZ_N)?;
    Ok(online / opt.objective)
}

pub fn fuzz(config: &FuzzConfig) -> Result<FuzzReport> {
    if config.n_max == 0 || config.n_max > MAX_FUZZ_N {
        return Err(Error::TooManyJobs { n: config.n_max, max: MAX_FUZZ_N });
    }
    let trials: Vec<Trial> = (0..config.trials).into_par_iter().map(|i| run_trial(config, i)).collect::<Result<_>>()?;

    let worst = trials
        .iter()
        .filter(|t| t.ratio.is_some())
        .max_by(|a, b| a.ratio.cmp(&b.ratio).then(b.hash.cmp(&a.hash)));
    let classes = CLASSES
        .iter()
        .map(|&class| {
            let of: Vec<&Trial> = trials.iter().filter(|t| t.class == class).collect();
            let ratios: Vec<&Rational> = of.iter().filter_map(|t| t.ratio.as_ref()).collect();
            let max = ratios.iter().max().map(|r| (*r).clone());
            let one = Rational::from_integer(1.into());
            ClassStats {
                class,
                trials: of.len(),
                skipped: of.len() - ratios.len(),
                exact_ones: ratios.iter().filter(|r| ***r == one).count(),
                max_ratio: max.as_ref().map(to_f64).unwrap_or(f64::NAN),
                max_ratio_exact: max.as_ref().map(format_rational).unwrap_or_default(),
                mean_ratio: ratios.iter().map(|r| to_f64(r)).sum::<f64>() / ratios.len().max(1) as f64,
            }
        })
        .collect();

    let worst_ratio = worst.and_then(|t| t.ratio.as_ref()).map(to_f64).unwrap_or(f64::NAN);
    let mut certificate = None;
    if let (Some(dir), Some(t)) = (&config.certificate_dir, worst) {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("fuzz_certificate.json");
        let mut inst = t.instance.clone();
        inst.tags.kind = Some("fuzz-certificate".into());
        inst.tags.params.insert("ratio".into(), format_rational(t.ratio.as_ref().expect("filtered")));
        write_instance(&inst, &path)?;
        certificate = Some(path);
    }
    Ok(FuzzReport {
        trials: config.trials,
        seed: config.seed,
        n_max: config.n_max,
        worst_ratio,
        worst_ratio_exact: worst.and_then(|t| t.ratio.as_ref()).map(format_rational).unwrap_or_default(),
        worst_class: worst.map(|t| t.class),
        certificate,
        envelope: config.envelope,
        breached: worst_ratio > config.envelope,
        classes,
    })
}

/// Recomputes the ratio of a written certificate.
pub fn replay_certificate(path: impl AsRef<Path>) -> Result<Rational> {
    performance_ratio(&read_instance(path)?)
}
