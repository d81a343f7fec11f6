use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{Algorithm, ExperimentState, Learner, RngStreams};

pub const POSTERIOR_VERSION: &str = "loadseq-posterior/1";

/// Trained state plus the RNG streams, so training can resume exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosteriorSnapshot {
    pub version: String,
    pub algorithm: Algorithm,
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    pub config_digest: String,
    pub learner: Learner,
    pub rng: RngStreams,
    pub observed_max: Option<f64>,
}

impl PosteriorSnapshot {
    pub fn new(algorithm: Algorithm, config_digest: String, state: &ExperimentState) -> Self {
        PosteriorSnapshot {
            version: POSTERIOR_VERSION.to_string(),
            algorithm,
            n: state.learner.n_workers(),
            trials: state.completed_trials,
            config_digest,
            learner: state.learner.clone(),
            rng: state.rngs.clone(),
            observed_max: state.observed_max,
        }
    }

    pub fn into_state(self) -> ExperimentState {
        ExperimentState {
            learner: self.learner,
            rngs: self.rng,
            completed_trials: self.trials,
            observed_max: self.observed_max,
        }
    }
}

pub fn save_posterior(snapshot: &PosteriorSnapshot, path: impl AsRef<Path>) -> Result<()> {
    super::summary::write_json(snapshot, path.as_ref()).map(drop)
}

/// Parses a snapshot; Beta parameters are re-validated on the way in.
pub fn parse_posterior(json: &str) -> Result<PosteriorSnapshot> {
    // check the version before the body so old files fail clearly
    #[derive(Deserialize)]
    struct Probe {
        version: Option<String>,
    }
    let probe: Probe = serde_json::from_str(json)?;
    match probe.version.as_deref() {
        Some(POSTERIOR_VERSION) => {}
        found => {
            return Err(Error::VersionMismatch {
                found: found.unwrap_or("<missing>").to_string(),
                expected: POSTERIOR_VERSION.to_string(),
            })
        }
    }
    let snap: PosteriorSnapshot =
        serde_json::from_str(json).map_err(|e| Error::InvalidSnapshot(e.to_string()))?;
    if snap.learner.n_workers() != snap.n {
        return Err(Error::InvalidSnapshot(format!(
            "N is {} but the posterior covers {} workers",
            snap.n,
            snap.learner.n_workers()
        )));
    }
    Ok(snap)
}

pub fn load_posterior(path: impl AsRef<Path>) -> Result<PosteriorSnapshot> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_posterior(&text)
}
