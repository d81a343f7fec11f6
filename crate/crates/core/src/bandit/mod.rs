//! Thompson-sampling state: per-sequence arms and the position/worker
//! weight space, with reward normalisation.

mod arms;
mod beta;
mod reward;
mod weights;

use serde::{Deserialize, Serialize};

use crate::schedule::Sequence;

pub use arms::{select_arm_exhaustive, Arm, ArmTable, DEFAULT_ARM_CAP};
pub use beta::BetaParams;
pub use reward::{normalize_reward, RewardNormalizer};
pub use weights::{
    score, score_order, select_arm_weighted, update_weighted, SequenceVector, WeightVector,
};

/// Deterministic pick from a posterior. `untrained` is set when the state
/// still equals its prior, in which case the identity order is returned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recommendation {
    pub sequence: Sequence,
    pub untrained: bool,
}
