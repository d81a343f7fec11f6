//! Recursive batch optimisation.
//!
//! Workers are split at random into `b_n` batches (recursively, until a
//! group has at most `b_s` workers). A batch acts as one macro-unit whose
//! members are served back to back in their current internal order. Every
//! node of the tree gets one training phase that orders its units with the
//! weight-space learner; after a node's phase its children are trained
//! front to back, each holding everything else fixed.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::{BetaParams, SequenceVector, WeightVector};
use crate::error::{Error, Result};
use crate::schedule::Sequence;
use crate::search::exhaustive_min;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatchConfig {
    /// Batches per split (`b_n`).
    pub batch_count: usize,
    /// Largest group trained directly without splitting (`b_s`).
    pub leaf_threshold: usize,
    /// Trials spent on each phase.
    pub trials_per_phase: usize,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            batch_count: 5,
            leaf_threshold: 6,
            trials_per_phase: 1000,
        }
    }
}

impl BatchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_count < 2 {
            return Err(Error::InvalidConfig("batch_count must be at least 2".into()));
        }
        if self.leaf_threshold < 2 {
            return Err(Error::InvalidConfig("leaf_threshold must be at least 2".into()));
        }
        if self.trials_per_phase == 0 {
            return Err(Error::InvalidConfig("trials_per_phase must be positive".into()));
        }
        Ok(())
    }
}

/// Shuffles `workers` into `batch_count` groups; the first
/// `len % batch_count` groups get one extra member.
pub fn partition_batches<R: Rng + ?Sized>(
    workers: &[usize],
    batch_count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    if batch_count == 0 || workers.len() < batch_count {
        return Err(Error::InvalidConfig(format!(
            "cannot split {} workers into {batch_count} batches",
            workers.len()
        )));
    }
    let mut shuffled = workers.to_vec();
    shuffled.shuffle(rng);
    let base = shuffled.len() / batch_count;
    let extra = shuffled.len() % batch_count;
    let mut rest = shuffled.as_slice();
    let mut out = Vec::with_capacity(batch_count);
    for b in 0..batch_count {
        let size = base + usize::from(b < extra);
        let (head, tail) = rest.split_at(size);
        out.push(head.to_vec());
        rest = tail;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BatchNode {
    Leaf { workers: Vec<usize> },
    Group { children: Vec<BatchNode> },
}

impl BatchNode {
    pub fn build<R: Rng + ?Sized>(workers: Vec<usize>, cfg: &BatchConfig, rng: &mut R) -> Result<Self> {
        if workers.len() <= cfg.leaf_threshold {
            return Ok(BatchNode::Leaf { workers });
        }
        let children = partition_batches(&workers, cfg.batch_count, rng)?
            .into_iter()
            .map(|batch| BatchNode::build(batch, cfg, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(BatchNode::Group { children })
    }

    /// Number of units this node orders.
    pub fn units(&self) -> usize {
        match self {
            BatchNode::Leaf { workers } => workers.len(),
            BatchNode::Group { children } => children.len(),
        }
    }

    pub fn flatten(&self, out: &mut Vec<usize>) {
        match self {
            BatchNode::Leaf { workers } => out.extend_from_slice(workers),
            BatchNode::Group { children } => children.iter().for_each(|c| c.flatten(out)),
        }
    }

    /// Flattens with the units of the node at `path` taken in `arrangement`
    /// order instead of their stored order.
    fn flatten_with(&self, path: &[usize], arrangement: &[usize], out: &mut Vec<usize>) {
        match (self, path.split_first()) {
            (BatchNode::Leaf { workers }, None) => {
                out.extend(arrangement.iter().map(|&u| workers[u]));
            }
            (BatchNode::Group { children }, None) => {
                for &u in arrangement {
                    children[u].flatten(out);
                }
            }
            (BatchNode::Group { children }, Some((&head, rest))) => {
                for (i, c) in children.iter().enumerate() {
                    if i == head {
                        c.flatten_with(rest, arrangement, out);
                    } else {
                        c.flatten(out);
                    }
                }
            }
            (BatchNode::Leaf { .. }, Some(_)) => unreachable!("path runs past a leaf"),
        }
    }

    fn node_mut(&mut self, path: &[usize]) -> &mut BatchNode {
        match path.split_first() {
            None => self,
            Some((&head, rest)) => match self {
                BatchNode::Group { children } => children[head].node_mut(rest),
                BatchNode::Leaf { .. } => unreachable!("path runs past a leaf"),
            },
        }
    }

    fn node(&self, path: &[usize]) -> &BatchNode {
        match path.split_first() {
            None => self,
            Some((&head, rest)) => match self {
                BatchNode::Group { children } => children[head].node(rest),
                BatchNode::Leaf { .. } => unreachable!("path runs past a leaf"),
            },
        }
    }

    fn rearrange(&mut self, arrangement: &[usize]) {
        match self {
            BatchNode::Leaf { workers } => {
                *workers = arrangement.iter().map(|&u| workers[u]).collect();
            }
            BatchNode::Group { children } => {
                let old = std::mem::take(children);
                let mut slots: Vec<Option<BatchNode>> = old.into_iter().map(Some).collect();
                *children = arrangement.iter().map(|&u| slots[u].take().unwrap()).collect();
            }
        }
    }

    /// Nodes that need a phase (two or more units), in tree order.
    pub fn trainable_nodes(&self) -> usize {
        let own = usize::from(self.units() >= 2);
        match self {
            BatchNode::Leaf { .. } => own,
            BatchNode::Group { children } => {
                own + children.iter().map(BatchNode::trainable_nodes).sum::<usize>()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    /// Orders whole batches.
    BatchSequencing,
    /// Orders individual workers inside one batch.
    Leaf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSummary {
    pub path: Vec<usize>,
    pub kind: PhaseKind,
    pub units: usize,
    pub trials: usize,
    /// Unit order chosen at the end of the phase.
    pub arrangement: Sequence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Phase {
    path: Vec<usize>,
    kind: PhaseKind,
    weights: WeightVector,
    trials: usize,
    candidate: Option<Vec<usize>>,
}

/// Stepwise batch optimiser: one `select`/`update` pair per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchLearner {
    config: BatchConfig,
    prior: BetaParams,
    cap: usize,
    root: BatchNode,
    pending: VecDeque<Vec<usize>>,
    phase: Option<Phase>,
    completed: Vec<PhaseSummary>,
}

impl BatchLearner {
    /// Builds the batch tree over `n` workers using `rng` for membership.
    pub fn new<R: Rng + ?Sized>(
        n: usize,
        config: BatchConfig,
        prior: BetaParams,
        cap: usize,
        rng: &mut R,
    ) -> Result<Self> {
        config.validate()?;
        if n == 0 {
            return Err(Error::InvalidConfig("at least one worker is required".into()));
        }
        let widest = config.batch_count.max(config.leaf_threshold.min(n));
        if widest > cap {
            return Err(Error::Capacity { n: widest, cap });
        }
        BetaParams::proper(prior.alpha(), prior.beta())?;
        let root = BatchNode::build((0..n).collect(), &config, rng)?;
        let mut learner = BatchLearner {
            config,
            prior,
            cap,
            root,
            pending: VecDeque::from([Vec::new()]),
            phase: None,
            completed: Vec::new(),
        };
        learner.start_next_phase()?;
        Ok(learner)
    }

    pub fn root(&self) -> &BatchNode {
        &self.root
    }

    pub fn is_done(&self) -> bool {
        self.phase.is_none()
    }

    pub fn completed_phases(&self) -> &[PhaseSummary] {
        &self.completed
    }

    pub fn total_phases(&self) -> usize {
        self.root.trainable_nodes()
    }

    /// Current full sequence with every node in its stored order.
    pub fn current_sequence(&self) -> Sequence {
        let mut out = Vec::new();
        self.root.flatten(&mut out);
        Sequence::new(out).expect("batch tree covers every worker once")
    }

    fn start_next_phase(&mut self) -> Result<()> {
        while let Some(path) = self.pending.pop_front() {
            let node = self.root.node(&path);
            let units = node.units();
            if units >= 2 {
                let kind = match node {
                    BatchNode::Leaf { .. } => PhaseKind::Leaf,
                    BatchNode::Group { .. } => PhaseKind::BatchSequencing,
                };
                self.phase = Some(Phase {
                    path,
                    kind,
                    weights: WeightVector::new(units, self.prior)?,
                    trials: 0,
                    candidate: None,
                });
                return Ok(());
            }
            self.enqueue_children(&path);
        }
        self.phase = None;
        Ok(())
    }

    fn enqueue_children(&mut self, path: &[usize]) {
        if let BatchNode::Group { children } = self.root.node(path) {
            for i in (0..children.len()).rev() {
                let mut child = path.to_vec();
                child.push(i);
                self.pending.push_front(child);
            }
        }
    }

    /// Sequence to play this trial. During a phase the active node's units
    /// follow the argmin of a fresh weight sample; once every phase is done
    /// the final trained sequence is returned.
    pub fn select<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Sequence> {
        let Some(phase) = self.phase.as_mut() else {
            return Ok(self.current_sequence());
        };
        let sample = phase.weights.sample(rng);
        let arrangement = exhaustive_min(phase.weights.n_workers(), &sample).into_order();
        let mut out = Vec::new();
        self.root.flatten_with(&phase.path, &arrangement, &mut out);
        phase.candidate = Some(arrangement);
        Sequence::new(out)
    }

    /// Applies the outcome of the sequence returned by the last `select`.
    pub fn update(&mut self, success: bool) -> Result<()> {
        let Some(phase) = self.phase.as_mut() else {
            return Ok(());
        };
        let arrangement = phase.candidate.take().ok_or_else(|| {
            Error::InvalidConfig("batch update called without a preceding select".into())
        })?;
        let sv = SequenceVector::encode(&Sequence::new(arrangement)?);
        phase.weights.update(&sv, success)?;
        phase.trials += 1;
        if phase.trials >= self.config.trials_per_phase {
            self.finish_phase()?;
        }
        Ok(())
    }

    fn finish_phase(&mut self) -> Result<()> {
        let phase = self.phase.take().expect("active phase");
        let arrangement = phase.weights.recommend(self.cap).sequence;
        self.root.node_mut(&phase.path).rearrange(arrangement.order());
        self.completed.push(PhaseSummary {
            path: phase.path.clone(),
            kind: phase.kind,
            units: phase.weights.n_workers(),
            trials: phase.trials,
            arrangement,
        });
        self.enqueue_children(&phase.path);
        self.start_next_phase()
    }
}

/// Result of running every batch phase to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutcome {
    pub sequence: Sequence,
    pub phases: Vec<PhaseSummary>,
}

/// Runs the full phase schedule. `play` performs one trial with the given
/// sequence and returns its Bernoulli outcome.
pub fn batch_optimize<F, R1, R2>(
    n: usize,
    config: &BatchConfig,
    prior: BetaParams,
    cap: usize,
    mut play: F,
    partition_rng: &mut R1,
    sampling_rng: &mut R2,
) -> Result<BatchOutcome>
where
    F: FnMut(&Sequence) -> Result<bool>,
    R1: Rng + ?Sized,
    R2: Rng + ?Sized,
{
    let mut learner = BatchLearner::new(n, *config, prior, cap, partition_rng)?;
    while !learner.is_done() {
        let seq = learner.select(sampling_rng)?;
        let outcome = play(&seq)?;
        learner.update(outcome)?;
    }
    Ok(BatchOutcome {
        sequence: learner.current_sequence(),
        phases: learner.completed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn partition_sizes_put_remainder_in_front() {
        let workers: Vec<usize> = (0..20).collect();
        let sizes: Vec<_> = partition_batches(&workers, 5, &mut rng(1))
            .unwrap()
            .iter()
            .map(Vec::len)
            .collect();
        assert_eq!(sizes, vec![4; 5]);

        let workers: Vec<usize> = (0..10).collect();
        let batches = partition_batches(&workers, 4, &mut rng(2)).unwrap();
        assert_eq!(batches.iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 3, 2, 2]);
        let mut all: Vec<_> = batches.concat();
        all.sort();
        assert_eq!(all, workers);

        assert!(partition_batches(&[0, 1, 2], 5, &mut rng(3)).is_err());
    }

    #[test]
    fn small_systems_train_as_one_leaf() {
        let learner =
            BatchLearner::new(4, BatchConfig::default(), BetaParams::UNIFORM, 8, &mut rng(0)).unwrap();
        assert!(matches!(learner.root(), BatchNode::Leaf { .. }));
        assert_eq!(learner.total_phases(), 1);
    }

    #[test]
    fn twenty_workers_give_one_batch_phase_and_five_leaf_phases() {
        let cfg = BatchConfig {
            batch_count: 5,
            leaf_threshold: 6,
            trials_per_phase: 3,
        };
        let mut calls = 0;
        let outcome = batch_optimize(
            20,
            &cfg,
            BetaParams::UNIFORM,
            8,
            |seq| {
                assert_eq!(seq.len(), 20);
                calls += 1;
                Ok(calls % 3 == 0)
            },
            &mut rng(7),
            &mut rng(8),
        )
        .unwrap();
        let kinds: Vec<_> = outcome.phases.iter().map(|p| p.kind).collect();
        assert_eq!(kinds[0], PhaseKind::BatchSequencing);
        assert_eq!(kinds[1..], [PhaseKind::Leaf; 5]);
        assert_eq!(calls, 6 * 3);
        assert_eq!(outcome.sequence.len(), 20);
    }

    #[test]
    fn deeper_trees_recurse() {
        let cfg = BatchConfig {
            batch_count: 2,
            leaf_threshold: 3,
            trials_per_phase: 2,
        };
        let learner = BatchLearner::new(12, cfg, BetaParams::UNIFORM, 8, &mut rng(5)).unwrap();
        // 12 -> 6+6 -> (3+3)+(3+3): 1 + 2 + 4 phases
        assert_eq!(learner.total_phases(), 7);
        let mut sampling = rng(6);
        let mut learner = learner;
        let mut played = 0;
        while !learner.is_done() {
            let s = learner.select(&mut sampling).unwrap();
            assert_eq!(s.len(), 12);
            learner.update(played % 2 == 0).unwrap();
            played += 1;
        }
        assert_eq!(played, 14);
        assert_eq!(learner.completed_phases().len(), 7);
    }

    #[test]
    fn update_requires_select() {
        let mut learner =
            BatchLearner::new(4, BatchConfig::default(), BetaParams::UNIFORM, 8, &mut rng(0)).unwrap();
        assert!(learner.update(true).is_err());
    }

    #[test]
    fn rejects_zero_trial_phases() {
        let cfg = BatchConfig {
            trials_per_phase: 0,
            ..BatchConfig::default()
        };
        assert!(BatchLearner::new(4, cfg, BetaParams::UNIFORM, 8, &mut rng(0)).is_err());
    }
}
