use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::{
    select_arm_exhaustive, select_arm_weighted, update_weighted, ArmTable, BetaParams,
    Recommendation, SequenceVector, WeightVector,
};
use crate::error::{Error, Result};
use crate::schedule::Sequence;
use crate::search::{BatchConfig, BatchLearner, HillClimbConfig, SearchStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// One Beta arm per sequence.
    TsExhaustive,
    /// Position/worker weights, exhaustive argmin.
    #[default]
    TsWeights,
    /// Position/worker weights, hill-climbing argmin.
    TsHillclimb,
    /// Recursive batch optimisation over position/worker weights.
    TsBatch,
    /// Uniformly random sequence every trial.
    RandomBaseline,
}

/// Everything a learner needs besides the RNG streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerSpec {
    pub algorithm: Algorithm,
    pub n: usize,
    pub prior: BetaParams,
    pub arm_cap: usize,
    pub hill_climb: HillClimbConfig,
    pub batch: BatchConfig,
}

/// Posterior state of any of the algorithms, serialisable for snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Learner {
    Exhaustive {
        table: ArmTable,
    },
    Weights {
        weights: WeightVector,
        search: SearchStrategy,
        cap: usize,
    },
    Batch {
        learner: BatchLearner,
    },
    Random {
        n: usize,
    },
}

impl Learner {
    /// `partition_rng` is only consumed by the batch optimiser.
    pub fn new<R: Rng + ?Sized>(spec: &LearnerSpec, partition_rng: &mut R) -> Result<Self> {
        let n = spec.n;
        if n == 0 {
            return Err(Error::InvalidConfig("at least one worker is required".into()));
        }
        BetaParams::proper(spec.prior.alpha(), spec.prior.beta())?;
        Ok(match spec.algorithm {
            Algorithm::TsExhaustive => Learner::Exhaustive {
                table: ArmTable::new(n, spec.arm_cap, spec.prior)?,
            },
            Algorithm::TsWeights => {
                if n > spec.arm_cap {
                    return Err(Error::Capacity { n, cap: spec.arm_cap });
                }
                Learner::Weights {
                    weights: WeightVector::new(n, spec.prior)?,
                    search: SearchStrategy::Exhaustive { cap: spec.arm_cap },
                    cap: spec.arm_cap,
                }
            }
            Algorithm::TsHillclimb => {
                spec.hill_climb.validate()?;
                Learner::Weights {
                    weights: WeightVector::new(n, spec.prior)?,
                    search: SearchStrategy::HillClimb(spec.hill_climb),
                    cap: spec.arm_cap,
                }
            }
            Algorithm::TsBatch => Learner::Batch {
                learner: BatchLearner::new(n, spec.batch, spec.prior, spec.arm_cap, partition_rng)?,
            },
            Algorithm::RandomBaseline => Learner::Random { n },
        })
    }

    pub fn n_workers(&self) -> usize {
        match self {
            Learner::Exhaustive { table } => table.n_workers(),
            Learner::Weights { weights, .. } => weights.n_workers(),
            Learner::Batch { learner } => learner.current_sequence().len(),
            Learner::Random { n } => *n,
        }
    }

    /// Sequence to play next. Beta samples come from `sampling`; search
    /// restarts and random shuffles from `search`.
    pub fn select<R1, R2>(&mut self, sampling: &mut R1, search: &mut R2) -> Result<Sequence>
    where
        R1: Rng + ?Sized,
        R2: Rng + ?Sized,
    {
        match self {
            Learner::Exhaustive { table } => Ok(select_arm_exhaustive(table, sampling)),
            Learner::Weights {
                weights,
                search: strategy,
                ..
            } => Ok(select_arm_weighted(weights, strategy, sampling, search)?.0),
            Learner::Batch { learner } => learner.select(sampling),
            Learner::Random { n } => {
                let mut order: Vec<usize> = (0..*n).collect();
                order.shuffle(search);
                Sequence::new(order)
            }
        }
    }

    /// Credits the Bernoulli outcome to the sequence just played.
    pub fn update(&mut self, seq: &Sequence, success: bool) -> Result<()> {
        match self {
            Learner::Exhaustive { table } => table.update(seq, success),
            Learner::Weights { weights, .. } => {
                update_weighted(weights, &SequenceVector::encode(seq), success)
            }
            Learner::Batch { learner } => learner.update(success),
            Learner::Random { .. } => Ok(()),
        }
    }

    pub fn recommend(&self) -> Recommendation {
        match self {
            Learner::Exhaustive { table } => table.recommend(),
            Learner::Weights { weights, cap, .. } => weights.recommend(*cap),
            Learner::Batch { learner } => Recommendation {
                sequence: learner.current_sequence(),
                untrained: learner.completed_phases().is_empty(),
            },
            Learner::Random { n } => Recommendation {
                sequence: Sequence::identity(*n),
                untrained: true,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(algorithm: Algorithm, n: usize) -> LearnerSpec {
        LearnerSpec {
            algorithm,
            n,
            prior: BetaParams::UNIFORM,
            arm_cap: 8,
            hill_climb: HillClimbConfig::default(),
            batch: BatchConfig::default(),
        }
    }

    #[test]
    fn capacity_is_enforced_for_enumerating_algorithms() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for alg in [Algorithm::TsExhaustive, Algorithm::TsWeights] {
            assert!(matches!(
                Learner::new(&spec(alg, 9), &mut rng),
                Err(Error::Capacity { n: 9, cap: 8 })
            ));
        }
        assert!(Learner::new(&spec(Algorithm::TsHillclimb, 30), &mut rng).is_ok());
        assert!(Learner::new(&spec(Algorithm::RandomBaseline, 30), &mut rng).is_ok());
    }

    #[test]
    fn fresh_learners_are_untrained() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for alg in [
            Algorithm::TsExhaustive,
            Algorithm::TsWeights,
            Algorithm::TsHillclimb,
            Algorithm::RandomBaseline,
        ] {
            let l = Learner::new(&spec(alg, 4), &mut rng).unwrap();
            let rec = l.recommend();
            assert!(rec.untrained, "{alg:?}");
            assert_eq!(rec.sequence, Sequence::identity(4));
        }
    }

    #[test]
    fn snapshot_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut l = Learner::new(&spec(Algorithm::TsWeights, 4), &mut rng).unwrap();
        for i in 0..20 {
            let s = l.select(&mut rng.clone(), &mut rng).unwrap();
            l.update(&s, i % 3 == 0).unwrap();
        }
        let json = serde_json::to_string(&l).unwrap();
        let back: Learner = serde_json::from_str(&json).unwrap();
        assert_eq!(back, l);
    }
}
