//! Seeded trial loops: every trial draws fresh background load (in
//! time-varying mode), asks the learner for a sequence, solves it, turns the
//! finishing time into a Bernoulli outcome and feeds it back.

mod enumerate;
mod learner;
mod regret;
mod traces;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::{normalize_reward, BetaParams, RewardNormalizer, DEFAULT_ARM_CAP};
use crate::error::{Error, Result};
use crate::schedule::{solve_time_invariant, solve_time_varying, Sequence, SystemConfig};
use crate::search::{BatchConfig, HillClimbConfig};

pub use enumerate::{enumerate_sequences, EnumeratedSequence, Enumeration};
pub use learner::{Algorithm, Learner, LearnerSpec};
pub use regret::{
    cumulative_regret, windowed_makespan, windowed_regret, RegretReport, WindowStat,
};
pub use traces::{generate_traces, BackgroundJobModel, Redraw};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Nominal constant speeds every trial.
    #[default]
    TimeInvariant,
    /// Fresh background-job traces every trial.
    TimeVarying,
}

pub const DEFAULT_TRIALS: usize = 4000;
pub const DEFAULT_WINDOW: usize = 100;

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub mode: Mode,
    pub algorithm: Algorithm,
    pub trials: usize,
    /// Reporting window; `None` means `min(100, trials)`.
    pub window: Option<usize>,
    pub seed: u64,
    pub arm_cap: usize,
    pub prior: BetaParams,
    pub normalizer: RewardNormalizer,
    pub background: BackgroundJobModel,
    pub hill_climb: HillClimbConfig,
    pub batch: BatchConfig,
}

impl ExperimentConfig {
    /// Defaults for everything but the system.
    pub fn new(system: SystemConfig) -> Self {
        ExperimentConfig {
            system,
            mode: Mode::default(),
            algorithm: Algorithm::default(),
            trials: DEFAULT_TRIALS,
            window: None,
            seed: 0,
            arm_cap: DEFAULT_ARM_CAP,
            prior: BetaParams::UNIFORM,
            normalizer: RewardNormalizer::default(),
            background: BackgroundJobModel::default(),
            hill_climb: HillClimbConfig::default(),
            batch: BatchConfig::default(),
        }
    }

    pub fn window(&self) -> usize {
        self.window.unwrap_or(DEFAULT_WINDOW.min(self.trials))
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        match self.window {
            Some(0) => return Err(Error::InvalidConfig("window must be at least 1".into())),
            Some(w) if w > self.trials => {
                return Err(Error::InvalidConfig(format!(
                    "window {w} exceeds trials {}",
                    self.trials
                )))
            }
            _ => {}
        }
        if self.arm_cap == 0 {
            return Err(Error::InvalidConfig("arm_cap must be at least 1".into()));
        }
        self.normalizer.validate()?;
        self.background.validate()?;
        self.hill_climb.validate()?;
        self.batch.validate()
    }

    pub fn learner_spec(&self) -> LearnerSpec {
        LearnerSpec {
            algorithm: self.algorithm,
            n: self.system.n_workers(),
            prior: self.prior,
            arm_cap: self.arm_cap,
            hill_climb: self.hill_climb,
            batch: self.batch,
        }
    }
}

/// One row of the trial log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// One-based.
    pub trial: usize,
    pub sequence: Sequence,
    pub makespan: f64,
    /// Normalised reward `min(T_f / T_f^max, 1)`.
    pub reward: f64,
    /// The Bernoulli outcome credited to the learner.
    pub bernoulli: bool,
    pub tf_max: f64,
}

/// Independent ChaCha streams derived from one seed, so that e.g. changing
/// the search strategy does not perturb the background-load draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RngStreams {
    pub traces: ChaCha8Rng,
    pub beta: ChaCha8Rng,
    pub bernoulli: ChaCha8Rng,
    pub search: ChaCha8Rng,
}

impl RngStreams {
    pub fn new(seed: u64) -> Self {
        let stream = |id| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(id);
            rng
        };
        RngStreams {
            traces: stream(1),
            beta: stream(2),
            bernoulli: stream(3),
            search: stream(4),
        }
    }
}

/// Resumable state of a run: everything needed to continue bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentState {
    pub learner: Learner,
    pub rngs: RngStreams,
    pub completed_trials: usize,
    /// Largest finishing time seen so far (for the adaptive bound).
    pub observed_max: Option<f64>,
}

pub struct Experiment {
    config: ExperimentConfig,
    state: ExperimentState,
    // constant speeds: each sequence is solved once
    cache: HashMap<Sequence, f64>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let mut rngs = RngStreams::new(config.seed);
        let learner = Learner::new(&config.learner_spec(), &mut rngs.search)?;
        Ok(Experiment {
            config,
            state: ExperimentState {
                learner,
                rngs,
                completed_trials: 0,
                observed_max: None,
            },
            cache: HashMap::new(),
        })
    }

    /// Continues from a snapshot taken with [`Experiment::state`].
    pub fn resume(config: ExperimentConfig, state: ExperimentState) -> Result<Self> {
        config.validate()?;
        if state.learner.n_workers() != config.system.n_workers() {
            return Err(Error::DimensionMismatch {
                expected: config.system.n_workers(),
                actual: state.learner.n_workers(),
            });
        }
        Ok(Experiment {
            config,
            state,
            cache: HashMap::new(),
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn state(&self) -> &ExperimentState {
        &self.state
    }

    pub fn learner(&self) -> &Learner {
        &self.state.learner
    }

    pub fn into_state(self) -> ExperimentState {
        self.state
    }

    pub fn is_finished(&self) -> bool {
        self.state.completed_trials >= self.config.trials
    }

    /// Runs one trial; errors carry the trial number.
    pub fn step(&mut self) -> Result<TrialRecord> {
        let trial = self.state.completed_trials + 1;
        self.step_inner(trial).map_err(|e| e.at_trial(trial))
    }

    fn step_inner(&mut self, trial: usize) -> Result<TrialRecord> {
        let cfg = &self.config;
        let st = &mut self.state;
        let traces = match cfg.mode {
            Mode::TimeInvariant => None,
            Mode::TimeVarying => Some(generate_traces(
                &cfg.background,
                &cfg.system,
                &mut st.rngs.traces,
            )?),
        };
        let sequence = st.learner.select(&mut st.rngs.beta, &mut st.rngs.search)?;
        let makespan = match &traces {
            None => match self.cache.get(&sequence) {
                Some(&m) => m,
                None => {
                    let m = solve_time_invariant(&cfg.system, &sequence)?.makespan;
                    self.cache.insert(sequence.clone(), m);
                    m
                }
            },
            Some(tr) => solve_time_varying(&cfg.system, tr, &sequence, 0.0)?.makespan,
        };
        let observed = st.observed_max.map_or(makespan, |m| m.max(makespan));
        st.observed_max = Some(observed);
        let tf_max = cfg
            .normalizer
            .tf_max(&cfg.system, traces.as_ref(), 0.0, Some(observed))?;
        let reward = normalize_reward(makespan, tf_max)?;
        // success (alpha) means "slow": argmin of sampled weights is the
        // sequence believed fastest
        let bernoulli = st.rngs.bernoulli.gen::<f64>() < reward;
        st.learner.update(&sequence, bernoulli)?;
        st.completed_trials = trial;
        Ok(TrialRecord {
            trial,
            sequence,
            makespan,
            reward,
            bernoulli,
            tf_max,
        })
    }

    /// Runs the remaining trials.
    pub fn run(&mut self) -> Result<Vec<TrialRecord>> {
        let mut out = Vec::with_capacity(self.config.trials - self.state.completed_trials.min(self.config.trials));
        while !self.is_finished() {
            out.push(self.step()?);
        }
        Ok(out)
    }
}

/// Runs a whole experiment and returns the trial log and final posterior.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(Vec<TrialRecord>, Learner)> {
    let mut exp = Experiment::new(config.clone())?;
    let records = exp.run()?;
    Ok((records, exp.into_state().learner))
}

/// Runs the same experiment under several seeds on all available cores.
/// Results come back in seed order.
pub fn run_seeds(
    config: &ExperimentConfig,
    seeds: &[u64],
) -> Result<Vec<(Vec<TrialRecord>, Learner)>> {
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(seeds.len())
        .max(1);
    let chunk = seeds.len().div_ceil(threads).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&seed| {
                            run_experiment(&ExperimentConfig {
                                seed,
                                ..config.clone()
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(seeds.len());
        for h in handles {
            out.extend(h.join().expect("experiment thread panicked")?);
        }
        Ok(out)
    })
}
