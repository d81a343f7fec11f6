use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::beta::BetaParams;
use crate::bandit::Recommendation;
use crate::error::{Error, Result};
use crate::schedule::{all_sequences, Sequence};

/// Largest worker count for which all `N!` sequences are materialised.
pub const DEFAULT_ARM_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    pub sequence: Sequence,
    pub params: BetaParams,
}

/// One Beta posterior per distribution sequence, stored in lexicographic
/// order so that the position of an arm is its permutation rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawArmTable")]
pub struct ArmTable {
    n: usize,
    prior: BetaParams,
    arms: Vec<Arm>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArmTable {
    n: usize,
    prior: BetaParams,
    arms: Vec<Arm>,
}

impl TryFrom<RawArmTable> for ArmTable {
    type Error = Error;

    fn try_from(raw: RawArmTable) -> Result<Self> {
        let expected = all_sequences(raw.n);
        if raw.arms.len() != expected.len()
            || raw.arms.iter().zip(&expected).any(|(a, s)| &a.sequence != s)
        {
            return Err(Error::InvalidSnapshot(format!(
                "arm table must list all {} sequences of {} workers in order",
                expected.len(),
                raw.n
            )));
        }
        Ok(ArmTable {
            n: raw.n,
            prior: raw.prior,
            arms: raw.arms,
        })
    }
}

impl ArmTable {
    /// Table over every sequence of `n` workers, each starting at `prior`.
    pub fn new(n: usize, cap: usize, prior: BetaParams) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("at least one worker is required".into()));
        }
        if n > cap {
            return Err(Error::Capacity { n, cap });
        }
        let prior = BetaParams::proper(prior.alpha(), prior.beta())?;
        let arms = all_sequences(n)
            .into_iter()
            .map(|sequence| Arm {
                sequence,
                params: prior,
            })
            .collect();
        Ok(ArmTable { n, prior, arms })
    }

    pub fn n_workers(&self) -> usize {
        self.n
    }

    pub fn arms(&self) -> &[Arm] {
        &self.arms
    }

    pub fn get(&self, seq: &Sequence) -> Option<&BetaParams> {
        self.index_of(seq).map(|i| &self.arms[i].params)
    }

    pub fn get_mut(&mut self, seq: &Sequence) -> Option<&mut BetaParams> {
        self.index_of(seq).map(move |i| &mut self.arms[i].params)
    }

    fn index_of(&self, seq: &Sequence) -> Option<usize> {
        (seq.len() == self.n).then(|| seq.rank())
    }

    /// Draws one sample per arm and returns the arm with the smallest draw;
    /// ties go to the lexicographically first sequence.
    pub fn select<R: Rng + ?Sized>(&self, rng: &mut R) -> Sequence {
        let mut best = 0;
        let mut best_draw = f64::INFINITY;
        for (i, arm) in self.arms.iter().enumerate() {
            let draw = arm.params.sample(rng);
            if draw < best_draw {
                best_draw = draw;
                best = i;
            }
        }
        self.arms[best].sequence.clone()
    }

    pub fn update(&mut self, seq: &Sequence, success: bool) -> Result<()> {
        let n = self.n;
        let params = self.get_mut(seq).ok_or(Error::DimensionMismatch {
            expected: n,
            actual: seq.len(),
        })?;
        *params = params.bernoulli_update(success);
        Ok(())
    }

    /// Arm with the smallest posterior mean.
    pub fn recommend(&self) -> Recommendation {
        let untrained = self.arms.iter().all(|a| a.params == self.prior);
        if untrained {
            return Recommendation {
                sequence: Sequence::identity(self.n),
                untrained,
            };
        }
        let mut best = 0;
        let mut best_mean = f64::INFINITY;
        for (i, arm) in self.arms.iter().enumerate() {
            let m = arm.params.mean();
            if m < best_mean {
                best_mean = m;
                best = i;
            }
        }
        Recommendation {
            sequence: self.arms[best].sequence.clone(),
            untrained,
        }
    }
}

/// Algorithm-I arm selection: one Beta draw per sequence, argmin wins.
pub fn select_arm_exhaustive<R: Rng + ?Sized>(table: &ArmTable, rng: &mut R) -> Sequence {
    table.select(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seeded_selection_is_reproducible() {
        let table = ArmTable::new(4, DEFAULT_ARM_CAP, BetaParams::UNIFORM).unwrap();
        let picks = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20).map(|_| table.select(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(picks(11), picks(11));
        assert_ne!(picks(11), picks(12));
    }

    #[test]
    fn separated_arm_wins_almost_always() {
        let mut table = ArmTable::new(3, DEFAULT_ARM_CAP, BetaParams::UNIFORM).unwrap();
        let target = Sequence::new(vec![2, 0, 1]).unwrap();
        for arm in table.arms.iter_mut() {
            arm.params = if arm.sequence == target {
                BetaParams::new(1.0, 100.0).unwrap()
            } else {
                BetaParams::new(100.0, 1.0).unwrap()
            };
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let hits = (0..10_000).filter(|_| table.select(&mut rng) == target).count();
        assert!(hits >= 9_900, "{hits}");
    }

    #[test]
    fn capacity_and_prior_checks() {
        assert!(matches!(
            ArmTable::new(9, 8, BetaParams::UNIFORM),
            Err(Error::Capacity { n: 9, cap: 8 })
        ));
        assert!(ArmTable::new(3, 8, BetaParams::new(0.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn recommend_uses_means_and_flags_untrained() {
        let mut table = ArmTable::new(3, DEFAULT_ARM_CAP, BetaParams::UNIFORM).unwrap();
        let rec = table.recommend();
        assert!(rec.untrained);
        assert_eq!(rec.sequence, Sequence::identity(3));

        let target = Sequence::new(vec![1, 2, 0]).unwrap();
        for arm in table.arms.iter_mut() {
            // means 0.1 for the target, 0.9 for the rest
            arm.params = if arm.sequence == target {
                BetaParams::new(1.0, 9.0).unwrap()
            } else {
                BetaParams::new(9.0, 1.0).unwrap()
            };
        }
        let rec = table.recommend();
        assert!(!rec.untrained);
        assert_eq!(rec.sequence, target);
    }

    #[test]
    fn update_touches_one_arm() {
        let mut table = ArmTable::new(3, DEFAULT_ARM_CAP, BetaParams::UNIFORM).unwrap();
        let s = Sequence::new(vec![0, 2, 1]).unwrap();
        table.update(&s, true).unwrap();
        let changed: Vec<_> = table
            .arms()
            .iter()
            .filter(|a| a.params != BetaParams::UNIFORM)
            .collect();
        assert_eq!(changed.len(), 1);
        assert_eq!(changed[0].sequence, s);
        assert_eq!(changed[0].params, BetaParams::new(2.0, 1.0).unwrap());
        assert!(table.update(&Sequence::identity(2), true).is_err());
    }

    #[test]
    fn serde_round_trip_and_validation() {
        let mut table = ArmTable::new(3, DEFAULT_ARM_CAP, BetaParams::UNIFORM).unwrap();
        table.update(&Sequence::identity(3), false).unwrap();
        let json = serde_json::to_string(&table).unwrap();
        let back: ArmTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, table);
        let truncated = json.replacen(r#"{"sequence":"1-2-3","params":{"alpha":1.0,"beta":2.0}},"#, "", 1);
        assert!(serde_json::from_str::<ArmTable>(&truncated).is_err());
    }
}
