use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{normalize_releases, Instance};
use crate::numeric::{ratio, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobClass {
    General,
    UnitWeight,
    ZeroRelease,
}

/// Parameters are `k / denom` with `k` uniform in the given inclusive ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomRanges {
    pub denom: i64,
    pub release: (i64, i64),
    pub processing: (i64, i64),
    pub weight: (i64, i64),
    pub class: JobClass,
}

impl Default for RandomRanges {
    fn default() -> Self {
        RandomRanges { denom: 4, release: (0, 16), processing: (1, 12), weight: (1, 12), class: JobClass::General }
    }
}

impl RandomRanges {
    pub fn with_class(self, class: JobClass) -> RandomRanges {
        RandomRanges { class, ..self }
    }

    pub fn grid(&self) -> Rational {
        ratio(1, self.denom)
    }
}

pub fn gen_random(n: usize, seed: u64, ranges: &RandomRanges) -> Result<Instance> {
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    let ok = |(a, b): (i64, i64)| a <= b;
    if ranges.denom <= 0 || !ok(ranges.release) || !ok(ranges.processing) || !ok(ranges.weight) {
        return Err(Error::Domain("empty random range".into()));
    }
    if ranges.processing.0 <= 0 || ranges.release.0 < 0 || ranges.weight.0 < 0 {
        return Err(Error::Domain("random ranges must give p > 0, r >= 0, w >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = ranges.denom;
    let triples = (0..n)
        .map(|_| {
            let r = rng.gen_range(ranges.release.0..=ranges.release.1);
            let p = rng.gen_range(ranges.processing.0..=ranges.processing.1);
            let w = rng.gen_range(ranges.weight.0..=ranges.weight.1);
            let r = if ranges.class == JobClass::ZeroRelease { ratio(0, 1) } else { ratio(r, d) };
            let w = if ranges.class == JobClass::UnitWeight { ratio(1, 1) } else { ratio(w, d) };
            (r, ratio(p, d), w)
        })
        .collect();
    Ok(normalize_releases(&Instance::from_triples(triples)?))
}
