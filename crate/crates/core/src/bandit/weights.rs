//! Position/worker weight space.
//!
//! A sequence over `N` workers is encoded as `N` one-hot blocks of length
//! `N`; block `i` marks the worker served `i`-th. Each of the `N²` entries
//! carries its own Beta posterior, and a sequence's score under a sampled
//! weight vector is the sum of the `N` weights it selects.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::beta::BetaParams;
use crate::bandit::Recommendation;
use crate::error::{Error, Result};
use crate::schedule::Sequence;
use crate::search::{min_cost_assignment, SearchStrategy};

/// `N²` one-hot encoding of a sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceVector {
    n: usize,
    bits: Vec<u8>,
}

impl SequenceVector {
    pub fn encode(seq: &Sequence) -> Self {
        let n = seq.len();
        let mut bits = vec![0u8; n * n];
        for (pos, &w) in seq.order().iter().enumerate() {
            bits[pos * n + w] = 1;
        }
        SequenceVector { n, bits }
    }

    /// Validates a raw bit vector: `N` blocks with exactly one set bit each,
    /// and every worker marked exactly once.
    pub fn from_bits(n: usize, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: bits.len(),
            });
        }
        let sv = SequenceVector { n, bits };
        sv.decode()?;
        Ok(sv)
    }

    pub fn decode(&self) -> Result<Sequence> {
        let n = self.n;
        let mut order = Vec::with_capacity(n);
        for block in self.bits.chunks(n.max(1)) {
            if block.iter().any(|&b| b > 1) || block.iter().filter(|&&b| b == 1).count() != 1 {
                return Err(Error::InvalidSequence(
                    "each block must contain exactly one set bit".into(),
                ));
            }
            order.push(block.iter().position(|&b| b == 1).unwrap());
        }
        Sequence::new(order)
    }

    pub fn n_workers(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Block `i`: which worker is served `i`-th.
    pub fn block(&self, i: usize) -> &[u8] {
        &self.bits[i * self.n..(i + 1) * self.n]
    }
}

/// Inner product of an encoded sequence with a weight sample.
pub fn score(sv: &SequenceVector, weights: &[f64]) -> Result<f64> {
    if weights.len() != sv.bits.len() {
        return Err(Error::DimensionMismatch {
            expected: sv.bits.len(),
            actual: weights.len(),
        });
    }
    Ok(sv
        .bits
        .iter()
        .zip(weights)
        .filter(|(&b, _)| b == 1)
        .map(|(_, &w)| w)
        .sum())
}

/// Score of a sequence given as an order, without building the vector.
pub fn score_order(order: &[usize], weights: &[f64]) -> f64 {
    let n = order.len();
    order
        .iter()
        .enumerate()
        .map(|(pos, &w)| weights[pos * n + w])
        .sum()
}

/// One Beta posterior per entry of the sequence vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeightVector")]
pub struct WeightVector {
    n: usize,
    prior: BetaParams,
    params: Vec<BetaParams>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeightVector {
    n: usize,
    prior: BetaParams,
    params: Vec<BetaParams>,
}

impl TryFrom<RawWeightVector> for WeightVector {
    type Error = Error;

    fn try_from(raw: RawWeightVector) -> Result<Self> {
        if raw.params.len() != raw.n * raw.n {
            return Err(Error::InvalidSnapshot(format!(
                "weight vector for {} workers needs {} entries, found {}",
                raw.n,
                raw.n * raw.n,
                raw.params.len()
            )));
        }
        Ok(WeightVector {
            n: raw.n,
            prior: raw.prior,
            params: raw.params,
        })
    }
}

impl WeightVector {
    pub fn new(n: usize, prior: BetaParams) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("at least one worker is required".into()));
        }
        let prior = BetaParams::proper(prior.alpha(), prior.beta())?;
        Ok(WeightVector {
            n,
            prior,
            params: vec![prior; n * n],
        })
    }

    pub fn n_workers(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &[BetaParams] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [BetaParams] {
        &mut self.params
    }

    /// One draw per entry, in entry order.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.params.iter().map(|p| p.sample(rng)).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        self.params.iter().map(BetaParams::mean).collect()
    }

    /// Bernoulli update restricted to the entries the played sequence used.
    pub fn update(&mut self, sv: &SequenceVector, success: bool) -> Result<()> {
        if sv.bits.len() != self.params.len() {
            return Err(Error::DimensionMismatch {
                expected: self.params.len(),
                actual: sv.bits.len(),
            });
        }
        for (p, &bit) in self.params.iter_mut().zip(&sv.bits) {
            if bit == 1 {
                *p = p.bernoulli_update(success);
            }
        }
        Ok(())
    }

    /// Sequence minimising the score under posterior means. Uses exhaustive
    /// enumeration (lexicographic tie-break) up to `cap` workers and an
    /// exact assignment solver beyond.
    pub fn recommend(&self, cap: usize) -> Recommendation {
        let untrained = self.params.iter().all(|p| *p == self.prior);
        if untrained {
            return Recommendation {
                sequence: Sequence::identity(self.n),
                untrained,
            };
        }
        let means = self.means();
        let sequence = if self.n <= cap {
            crate::search::exhaustive_min(self.n, &means)
        } else {
            min_cost_assignment(self.n, &means)
        };
        Recommendation {
            sequence,
            untrained,
        }
    }
}

/// Algorithm-II selection: sample every weight once, then minimise the
/// score with `search`. Returns the pick and the sampled weights.
pub fn select_arm_weighted<R1, R2>(
    weights: &WeightVector,
    search: &SearchStrategy,
    sampling_rng: &mut R1,
    search_rng: &mut R2,
) -> Result<(Sequence, Vec<f64>)>
where
    R1: Rng + ?Sized,
    R2: Rng + ?Sized,
{
    let sample = weights.sample(sampling_rng);
    let seq = search.minimize(weights.n, &sample, search_rng)?;
    Ok((seq, sample))
}

/// Applies one trial's outcome to the entries used by `sv`.
pub fn update_weighted(weights: &mut WeightVector, sv: &SequenceVector, success: bool) -> Result<()> {
    weights.update(sv, success)
}
