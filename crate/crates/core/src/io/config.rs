use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bandit::{BetaParams, RewardNormalizer, DEFAULT_ARM_CAP};
use crate::error::{Error, Result};
use crate::schedule::SystemConfig;
use crate::search::{BatchConfig, HillClimbConfig};
use crate::sim::{Algorithm, BackgroundJobModel, ExperimentConfig, Mode, DEFAULT_TRIALS};

/// On-disk configuration: one flat JSON object. Only the system keys are
/// required; everything else has a default. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "N")]
    pub n: usize,
    pub z: Vec<f64>,
    pub omega: Vec<f64>,
    pub t_cm: f64,
    pub t_cp: f64,
    #[serde(default)]
    pub control_computes: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub algorithm: Algorithm,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_arm_cap")]
    pub arm_cap: usize,
    #[serde(default)]
    pub prior: BetaParams,
    #[serde(default)]
    pub normalizer: RewardNormalizer,
    #[serde(default)]
    pub background: BackgroundJobModel,
    #[serde(default)]
    pub hill_climb: HillClimbConfig,
    #[serde(default)]
    pub batch: BatchConfig,
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_arm_cap() -> usize {
    DEFAULT_ARM_CAP
}

impl ConfigFile {
    pub fn resolve(self) -> Result<ExperimentConfig> {
        for (key, len) in [("z", self.z.len()), ("omega", self.omega.len())] {
            if len != self.n {
                return Err(Error::InvalidConfig(format!(
                    "`{key}` has {len} entries but N is {}",
                    self.n
                )));
            }
        }
        let mut system = SystemConfig::new(self.omega, self.z, self.t_cm, self.t_cp)?;
        match (self.control_computes, self.omega0) {
            (true, Some(w0)) => system = system.with_control(w0)?,
            (true, None) => {
                return Err(Error::InvalidConfig(
                    "`control_computes` requires `omega0`".into(),
                ))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidConfig(
                    "`omega0` given but `control_computes` is false".into(),
                ))
            }
            (false, None) => {}
        }
        let mut cfg = ExperimentConfig::new(system);
        cfg.mode = self.mode;
        cfg.algorithm = self.algorithm;
        cfg.trials = self.trials;
        cfg.window = self.window;
        cfg.seed = self.seed;
        cfg.arm_cap = self.arm_cap;
        cfg.prior = self.prior;
        cfg.normalizer = self.normalizer;
        cfg.background = self.background;
        cfg.hill_climb = self.hill_climb;
        cfg.batch = self.batch;
        cfg.validate()?;
        // pin the default so the resolved form is explicit
        cfg.window = Some(cfg.window());
        Ok(cfg)
    }

    /// The fully resolved on-disk form of `cfg`.
    pub fn from_resolved(cfg: &ExperimentConfig) -> Self {
        let s = &cfg.system;
        ConfigFile {
            n: s.n_workers(),
            z: s.z.clone(),
            omega: s.omega.clone(),
            t_cm: s.t_cm,
            t_cp: s.t_cp,
            control_computes: s.control_computes,
            omega0: s.control_computes.then_some(s.omega0),
            mode: cfg.mode,
            algorithm: cfg.algorithm,
            trials: cfg.trials,
            window: Some(cfg.window()),
            seed: cfg.seed,
            arm_cap: cfg.arm_cap,
            prior: cfg.prior,
            normalizer: cfg.normalizer,
            background: cfg.background,
            hill_climb: cfg.hill_climb,
            batch: cfg.batch,
        }
    }
}

/// Parses and validates a configuration document. Schema errors name the
/// offending key; semantic errors (e.g. non-positive speeds) are
/// `InvalidConfig`.
pub fn parse_config(json: &str) -> Result<ExperimentConfig> {
    let file: ConfigFile =
        serde_json::from_str(json).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    file.resolve()
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// Hex SHA-256 of the resolved configuration's canonical JSON.
pub fn config_digest(cfg: &ExperimentConfig) -> String {
    let bytes = serde_json::to_vec(&ConfigFile::from_resolved(cfg)).expect("config serialises");
    hex_sha256(&bytes)
}

pub(crate) fn hex_sha256(data: &[u8]) -> String {
    Sha256::digest(data).iter().map(|b| format!("{b:02x}")).collect()
}
