//! Two long jobs released at 0 and one block of small jobs whose release
//! time, weight ratio and length react to the online schedule prefix.

mod policies;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::analysis::{golden_max, l1, l2, scan_then_golden};
use crate::error::{Error, Result};
use crate::instances::serialize_instance;
use crate::model::{objective, Instance, JobId, Schedule, Tags};
use crate::numeric::{format_rational, from_f64, ratio, serde_str, to_f64, Rational};
use crate::oracle::{closed_pair_optimal, Block};
use crate::simulator::{Engine, OnlinePolicy};

pub use policies::{Equalizer, FixedFirst};

const J1: JobId = JobId(0);
const J2: JobId = JobId(1);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    pub p1: Rational,
    pub p2: Rational,
    /// Length of each small job.
    pub delta: Rational,
}

impl Default for Game {
    fn default() -> Game {
        Game { p1: ratio(1, 1), p2: ratio(23364, 10000), delta: ratio(1, 1000) }
    }
}

impl Game {
    pub fn with_delta(delta: Rational) -> Game {
        Game { delta, ..Game::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// At `p1` the second job has all of `[0, p1]`.
    SecondRanFirst,
    /// At `p1` the second job's Smith ratio is at least the first's.
    AtFirstCheckpoint,
    /// Smith ratios meet at some `t_s` in `(p1, p2]`.
    Equalized,
    /// No meeting by `p2`.
    Terminal,
}

#[derive(Clone, Debug, Serialize)]
pub struct Checkpoint {
    #[serde(with = "serde_str")]
    pub t: Rational,
    #[serde(with = "serde_str")]
    pub r1: Rational,
    #[serde(with = "serde_str")]
    pub r2: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockRelease {
    #[serde(with = "serde_str")]
    pub release: Rational,
    #[serde(with = "serde_str")]
    pub ratio: Rational,
    #[serde(with = "serde_str")]
    pub piece: Rational,
    pub pieces: usize,
}

impl BlockRelease {
    pub fn length(&self) -> Rational {
        &self.piece * Rational::from_integer(self.pieces.into())
    }
}

/// What the adversary knows when it commits to the block, in floats.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchState {
    pub branch: Branch,
    pub p1: f64,
    pub p2: f64,
    pub release: f64,
    pub ratio: f64,
    pub r1: f64,
    pub r2: f64,
    /// Weighted completion of long jobs already finished.
    pub done: f64,
}

impl BranchState {
    /// The first closed form applies when the second job ran alone on
    /// `[0, p1]`; the second when the first job finished by `p1` and the
    /// second then ran alone until `p2`.
    pub fn closed_form(&self) -> Option<f64> {
        match self.branch {
            Branch::SecondRanFirst => Some(l1(self.p1, self.p2)),
            Branch::Terminal if self.r1 == 0.0 && self.r2 == self.p1 => Some(l2(self.p1, self.p2)),
            _ => None,
        }
    }

    /// Ratio if the block has length `l` and the online policy continues
    /// optimally from the state it is in.
    pub fn ratio_at(&self, l: f64) -> f64 {
        let block = Block { release: self.release, ratio: self.ratio, length: l, piece: 0.0 };
        let opt = closed_pair_optimal(&self.p1, &self.p1, &self.p2, &self.p2, &block);
        self.online_best(l) / opt
    }

    fn online_best(&self, l: f64) -> f64 {
        // Everything left is available at the release, so a best order is a sequence.
        let mut units: Vec<(f64, f64)> = Vec::new();
        if self.r1 > 0.0 {
            units.push((self.r1, self.p1));
        }
        if self.r2 > 0.0 {
            units.push((self.r2, self.p2));
        }
        let mut best = f64::INFINITY;
        for at in 0..=units.len() {
            let mut t = self.release;
            let mut cost = self.done;
            for k in 0..=units.len() {
                if k == at {
                    cost += self.ratio * l * (t + l / 2.0);
                    t += l;
                }
                if k < units.len() {
                    t += units[k].0;
                    cost += units[k].1 * t;
                }
            }
            best = best.min(cost);
            if units.len() == 2 {
                let mut t = self.release;
                let mut cost = self.done;
                let swapped = [units[1], units[0]];
                for k in 0..=2 {
                    if k == at {
                        cost += self.ratio * l * (t + l / 2.0);
                        t += l;
                    }
                    if k < 2 {
                        t += swapped[k].0;
                        cost += swapped[k].1 * t;
                    }
                }
                best = best.min(cost);
            }
        }
        best
    }
}

/// Block length: a closed form where one applies, otherwise the maximizer of
/// [`BranchState::ratio_at`] over `(0, 4 p2]`.
pub fn choose_l(state: &BranchState) -> f64 {
    state.closed_form().unwrap_or_else(|| optimize_l(state).0)
}

/// Numeric maximizer of the ratio over the block length and its value.
pub fn optimize_l(state: &BranchState) -> (f64, f64) {
    scan_then_golden(|l| state.ratio_at(l), 1e-9, 4.0 * state.p2, 400, 1e-9)
}

#[derive(Clone, Debug, Serialize)]
pub struct AdversaryTranscript {
    #[serde(with = "serde_str")]
    pub p1: Rational,
    #[serde(with = "serde_str")]
    pub p2: Rational,
    #[serde(with = "serde_str")]
    pub delta: Rational,
    pub branch: Branch,
    pub checkpoints: Vec<Checkpoint>,
    pub state: BranchState,
    /// Continuous block length the adversary aimed for.
    pub target_length: f64,
    /// Ratio predicted for a continuous block of that length.
    pub predicted_ratio: f64,
    /// In the equalized branch, the predicted ratio with the block as long
    /// as the second job's remainder.
    pub remainder_length_ratio: Option<f64>,
    pub block: BlockRelease,
    #[serde(serialize_with = "serialize_instance")]
    pub instance: Instance,
    pub schedule: Schedule,
    #[serde(with = "serde_str")]
    pub online: Rational,
    #[serde(with = "serde_str")]
    pub optimal: Rational,
    pub ratio: f64,
}

fn checkpoint<P: OnlinePolicy>(engine: &Engine<P>) -> Checkpoint {
    Checkpoint { t: engine.now().clone(), r1: engine.remaining(J1).clone(), r2: engine.remaining(J2).clone() }
}

/// Plays the game against `policy`. The policy sees jobs only once released.
pub fn play<P: OnlinePolicy>(policy: P, game: &Game) -> Result<AdversaryTranscript> {
    let Game { p1, p2, delta } = game;
    if !(p1.is_positive() && p2 > p1 && delta.is_positive()) {
        return Err(Error::Domain("need p2 > p1 > 0 and delta > 0".into()));
    }
    let mut engine = Engine::new(policy);
    engine.add_job(Rational::zero(), p1.clone(), p1.clone())?;
    engine.add_job(Rational::zero(), p2.clone(), p2.clone())?;
    engine.run_until(p1)?;
    let mut checkpoints = vec![checkpoint(&engine)];

    // Positive when the second job's Smith ratio is the larger.
    let gap = |e: &Engine<P>| p2 * e.remaining(J1) - p1 * e.remaining(J2);
    let branch = if !gap(&engine).is_negative() {
        if engine.remaining(J2) == &(p2 - p1) {
            Branch::SecondRanFirst
        } else {
            Branch::AtFirstCheckpoint
        }
    } else {
        loop {
            let g = gap(&engine);
            if g.is_zero() {
                break Branch::Equalized;
            }
            if engine.now() >= p2 {
                break Branch::Terminal;
            }
            let (job, mut end) = engine
                .peek()?
                .ok_or_else(|| Error::InfeasibleDispatch("long jobs finished before p2".into()))?;
            end = end.min(p2.clone());
            if job == J2 {
                // The gap grows at rate p1 while the second job runs.
                let root = engine.now() - &g / p1;
                end = end.min(root);
            }
            engine.step(Some(&end))?;
        }
    };
    if matches!(branch, Branch::Equalized | Branch::Terminal) {
        checkpoints.push(checkpoint(&engine));
    }

    let now = engine.now().clone();
    let (r1, r2) = (engine.remaining(J1).clone(), engine.remaining(J2).clone());
    let block_ratio = match branch {
        Branch::SecondRanFirst | Branch::AtFirstCheckpoint | Branch::Equalized => p2 / &r2,
        Branch::Terminal => [(p1, &r1), (p2, &r2)]
            .into_iter()
            .filter(|(_, r)| r.is_positive())
            .map(|(p, r)| p / r)
            .max()
            .expect("work remains at p2"),
    };
    let done: Rational = [(J1, p1), (J2, p2)]
        .into_iter()
        .filter(|(id, _)| engine.remaining(*id).is_zero())
        .filter_map(|(id, w)| engine.schedule().completion(id).map(|c| w * c))
        .sum();
    let state = BranchState {
        branch,
        p1: to_f64(p1),
        p2: to_f64(p2),
        release: to_f64(&now),
        ratio: to_f64(&block_ratio),
        r1: to_f64(&r1),
        r2: to_f64(&r2),
        done: to_f64(&done),
    };
    let target_length = choose_l(&state);
    let predicted_ratio = state.ratio_at(target_length);
    let remainder_length_ratio = (branch == Branch::Equalized).then(|| state.ratio_at(state.r2));

    let pieces = (from_f64(target_length)? / delta).round().to_usize().unwrap_or(0).max(1);
    let piece_weight = &block_ratio * delta;
    for _ in 0..pieces {
        engine.add_job(now.clone(), delta.clone(), piece_weight.clone())?;
    }
    engine.run_to_completion()?;
    let block = BlockRelease { release: now, ratio: block_ratio, piece: delta.clone(), pieces };

    let (jobs, schedule) = engine.into_parts();
    let mut instance = Instance::new(jobs)?;
    let mut tags = Tags { kind: Some("adversary".into()), long_jobs: vec![J1, J2], ..Tags::default() };
    for (k, v) in [("p1", p1), ("p2", p2), ("delta", delta)] {
        tags.params.insert(k.into(), format_rational(v));
    }
    instance.tags = tags;
    let online = objective(&schedule, &instance)?;
    let optimal = closed_pair_optimal(
        p1,
        p1,
        p2,
        p2,
        &Block { release: block.release.clone(), ratio: block.ratio.clone(), length: block.length(), piece: delta.clone() },
    );
    let ratio = to_f64(&(&online / &optimal));
    Ok(AdversaryTranscript {
        p1: p1.clone(),
        p2: p2.clone(),
        delta: delta.clone(),
        branch,
        checkpoints,
        state,
        target_length,
        predicted_ratio,
        remainder_length_ratio,
        block,
        instance,
        schedule,
        online,
        optimal,
        ratio,
    })
}

/// Runs `policy` on the realized instance with every job known in advance
/// to the engine but released on time.
pub fn replay<P: OnlinePolicy>(policy: P, instance: &Instance) -> Result<Schedule> {
    let mut engine = Engine::new(policy);
    for j in instance.jobs() {
        engine.add_job(j.release.clone(), j.processing.clone(), j.weight.clone())?;
    }
    engine.run_to_completion()?;
    Ok(engine.into_parts().1)
}

/// Golden-section maximum of the ratio on `[a, b]`, for probing the branch
/// objective away from the chosen length.
pub fn ratio_on(state: &BranchState, a: f64, b: f64) -> (f64, f64) {
    golden_max(|l| state.ratio_at(l), a, b, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{optimal_bruteforce, DEFAULT_MAX_N};
    use crate::simulator::{Priority, PriorityPolicy, TieRule};

    fn wsrpt(tie: TieRule) -> PriorityPolicy {
        PriorityPolicy::new(Priority::Wsrpt, tie)
    }

    #[test]
    fn prefer_running_reaches_terminal_closed_form() {
        let t = play(wsrpt(TieRule::PreferRunning), &Game::with_delta(ratio(1, 100))).unwrap();
        assert_eq!(t.branch, Branch::Terminal);
        assert!(t.state.closed_form().is_some());
        assert_eq!(t.checkpoints[1].r2, ratio(1, 1));
    }

    #[test]
    fn second_first_closed_form_matches_optimizer() {
        let t = play(FixedFirst::new(J2), &Game::with_delta(ratio(1, 100))).unwrap();
        assert_eq!(t.branch, Branch::SecondRanFirst);
        let (l, _) = optimize_l(&t.state);
        assert!((l - l1(1.0, 2.3364)).abs() < 1e-4, "{l}");
    }

    #[test]
    fn terminal_closed_form_matches_optimizer() {
        let t = play(wsrpt(TieRule::PreferRunning), &Game::with_delta(ratio(1, 100))).unwrap();
        let (l, _) = optimize_l(&t.state);
        assert!((l - l2(1.0, 2.3364)).abs() < 1e-4, "{l}");
    }

    #[test]
    fn chosen_length_beats_empty_block() {
        for t in [
            play(wsrpt(TieRule::PreferRunning), &Game::default()).unwrap(),
            play(Equalizer::new(ratio(3, 5)), &Game::default()).unwrap(),
        ] {
            assert!(t.state.ratio_at(0.0) <= t.predicted_ratio + 1e-12);
        }
    }

    #[test]
    fn equalizer_meets_inside_first_half() {
        let t = play(Equalizer::new(ratio(3, 5)), &Game::with_delta(ratio(1, 100))).unwrap();
        assert_eq!(t.branch, Branch::Equalized);
        let cp = &t.checkpoints[1];
        assert_eq!(cp.t, ratio(133456, 100000));
        assert_eq!(&t.p2 * &cp.r1, &t.p1 * &cp.r2);
        assert!(t.ratio > 1.13);
    }

    #[test]
    fn coarse_block_matches_bruteforce() {
        for policy in [
            Box::new(wsrpt(TieRule::PreferRunning)) as Box<dyn OnlinePolicy>,
            Box::new(FixedFirst::new(J2)),
            Box::new(Equalizer::new(ratio(3, 5))),
        ] {
            let t = play(policy, &Game::with_delta(ratio(1, 2))).unwrap();
            assert!(t.instance.len() <= 8);
            let bf = optimal_bruteforce(&t.instance, DEFAULT_MAX_N).unwrap();
            assert_eq!(bf.objective, t.optimal);
            assert!(t.online >= t.optimal);
        }
    }

    #[test]
    fn replay_reproduces_schedule() {
        let t = play(wsrpt(TieRule::PreferNewLongest), &Game::with_delta(ratio(1, 50))).unwrap();
        let again = replay(wsrpt(TieRule::PreferNewLongest), &t.instance).unwrap();
        assert_eq!(again, t.schedule);
    }
}
