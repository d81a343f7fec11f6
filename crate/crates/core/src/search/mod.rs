//! Minimising the weight score over permutations.

mod assignment;
mod batch;
mod hill_climb;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::score_order;
use crate::error::{Error, Result};
use crate::schedule::{next_permutation, Sequence};

pub use assignment::min_cost_assignment;
pub use batch::{
    batch_optimize, partition_batches, BatchConfig, BatchLearner, BatchNode, BatchOutcome,
    PhaseKind, PhaseSummary,
};
pub use hill_climb::{hill_climb, hill_climb_traced, HillClimbConfig, HillClimbTrace};

/// How a weight sample is turned into a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchStrategy {
    /// Scores all `N!` sequences; refuses more than `cap` workers.
    Exhaustive { cap: usize },
    HillClimb(HillClimbConfig),
}

impl SearchStrategy {
    pub fn minimize<R: Rng + ?Sized>(&self, n: usize, weights: &[f64], rng: &mut R) -> Result<Sequence> {
        if weights.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: weights.len(),
            });
        }
        match self {
            SearchStrategy::Exhaustive { cap } => {
                if n > *cap {
                    return Err(Error::Capacity { n, cap: *cap });
                }
                Ok(exhaustive_min(n, weights))
            }
            SearchStrategy::HillClimb(cfg) => Ok(hill_climb(weights, n, cfg, rng)),
        }
    }
}

/// Score argmin over every permutation; ties go to the lexicographically
/// first.
pub fn exhaustive_min(n: usize, weights: &[f64]) -> Sequence {
    let mut order: Vec<usize> = (0..n).collect();
    let mut best = order.clone();
    let mut best_score = score_order(&order, weights);
    while next_permutation(&mut order) {
        let s = score_order(&order, weights);
        if s < best_score {
            best_score = s;
            best.copy_from_slice(&order);
        }
    }
    Sequence::new(best).expect("enumerated permutation")
}
