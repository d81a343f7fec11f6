//! Configuration files, output artifacts and the `train` driver.
//!
//! A training run writes four files into its output directory:
//! `trials.csv`, `summary.json`, `posterior.json` and `manifest.json`.
//! All but the manifest's timestamps are a pure function of the resolved
//! configuration.

mod config;
mod posterior;
mod summary;
mod trials;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{enumerate_sequences, Enumeration, Experiment, ExperimentConfig, Mode, TrialRecord};

use config::hex_sha256;
pub use config::{config_digest, load_config, parse_config, ConfigFile};
pub use posterior::{
    load_posterior, parse_posterior, save_posterior, PosteriorSnapshot, POSTERIOR_VERSION,
};
pub use summary::{emit_summary, Summary};
pub use trials::{
    emit_trials_csv, parse_trials_csv, read_trials_csv, trials_csv_bytes, TRIALS_HEADER,
};

pub const TRIALS_FILE: &str = "trials.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const POSTERIOR_FILE: &str = "posterior.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: &str = "loadseq-manifest/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

impl OutputFile {
    fn of(name: &str, data: &[u8]) -> Self {
        OutputFile {
            name: name.to_string(),
            bytes: data.len() as u64,
            sha256: hex_sha256(data),
        }
    }
}

/// Provenance of one training run. Replaying `config` reproduces every
/// listed output byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub version: String,
    pub artifact_version: String,
    pub config_digest: String,
    pub seed: u64,
    /// Unix seconds.
    pub started: u64,
    pub finished: u64,
    pub config: ConfigFile,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    /// The configuration recorded in the manifest, checked against its
    /// digest.
    pub fn resolved_config(&self) -> Result<ExperimentConfig> {
        if self.version != MANIFEST_VERSION {
            return Err(Error::VersionMismatch {
                found: self.version.clone(),
                expected: MANIFEST_VERSION.to_string(),
            });
        }
        let cfg = self.config.clone().resolve()?;
        let digest = config_digest(&cfg);
        if digest != self.config_digest {
            return Err(Error::InvalidConfig(format!(
                "manifest digest {} does not match its configuration ({digest})",
                self.config_digest
            )));
        }
        Ok(cfg)
    }

    /// True when both runs produced identical outputs.
    pub fn same_outputs(&self, other: &RunManifest) -> bool {
        self.outputs == other.outputs
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<RunManifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("manifest: {e}")))
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Exhaustive optimum for regret, when it is defined and affordable:
/// constant speeds and at most `arm_cap` workers.
pub fn reference_enumeration(cfg: &ExperimentConfig) -> Result<Option<Enumeration>> {
    if cfg.mode != Mode::TimeInvariant || cfg.system.n_workers() > cfg.arm_cap {
        return Ok(None);
    }
    enumerate_sequences(&cfg.system, cfg.arm_cap).map(Some)
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
    pub posterior: PosteriorSnapshot,
    pub manifest: RunManifest,
    pub out_dir: PathBuf,
}

/// Runs the experiment and writes all artifacts into `out_dir` (created if
/// needed).
pub fn train(cfg: &ExperimentConfig, out_dir: impl AsRef<Path>) -> Result<TrainOutcome> {
    let out_dir = out_dir.as_ref();
    let started = unix_now();
    let digest = config_digest(cfg);

    let mut exp = Experiment::new(cfg.clone())?;
    let records = exp.run()?;
    let enumeration = reference_enumeration(cfg)?;
    let summary = summary::Summary::build(
        &records,
        enumeration.as_ref(),
        cfg.window(),
        Some(exp.learner().recommend()),
    )?;
    let posterior = PosteriorSnapshot::new(cfg.algorithm, digest.clone(), exp.state());

    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let write = |name: &str, data: &[u8]| -> Result<OutputFile> {
        let path = out_dir.join(name);
        std::fs::write(&path, data).map_err(|e| Error::io(&path, e))?;
        Ok(OutputFile::of(name, data))
    };
    let outputs = vec![
        write(TRIALS_FILE, &trials_csv_bytes(&records)?)?,
        write(SUMMARY_FILE, &summary::json_bytes(&summary)?)?,
        write(POSTERIOR_FILE, &summary::json_bytes(&posterior)?)?,
    ];
    let manifest = RunManifest {
        version: MANIFEST_VERSION.to_string(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config_digest: digest,
        seed: cfg.seed,
        started,
        finished: unix_now(),
        config: ConfigFile::from_resolved(cfg),
        outputs,
    };
    summary::write_json(&manifest, &out_dir.join(MANIFEST_FILE))?;
    Ok(TrainOutcome {
        records,
        summary,
        posterior,
        manifest,
        out_dir: out_dir.to_path_buf(),
    })
}

/// Re-runs a recorded training run into `out_dir`.
pub fn replay_manifest(manifest: &RunManifest, out_dir: impl AsRef<Path>) -> Result<TrainOutcome> {
    train(&manifest.resolved_config()?, out_dir)
}

/// Summary recomputed from a trial log alone (no recommendation).
pub fn report(
    records: &[TrialRecord],
    enumeration: Option<&Enumeration>,
    window: usize,
) -> Result<Summary> {
    Summary::build(records, enumeration, window, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: &str = r#"{"N":4,"z":[1,2,9,16],"omega":[1,2,9,16],"t_cm":1,"t_cp":4,
        "algorithm":"ts_weights","trials":300,"seed":11}"#;

    #[test]
    fn train_twice_gives_identical_bytes_and_replays() {
        let cfg = parse_config(CFG).unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let first = train(&cfg, a.path()).unwrap();
        let second = train(&cfg, b.path()).unwrap();
        for name in [TRIALS_FILE, SUMMARY_FILE, POSTERIOR_FILE] {
            let x = std::fs::read(a.path().join(name)).unwrap();
            let y = std::fs::read(b.path().join(name)).unwrap();
            assert_eq!(x, y, "{name}");
        }
        assert!(first.manifest.same_outputs(&second.manifest));

        let loaded = load_manifest(a.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(loaded.config_digest, first.manifest.config_digest);
        let c = tempfile::tempdir().unwrap();
        let replay = replay_manifest(&loaded, c.path()).unwrap();
        assert!(replay.manifest.same_outputs(&first.manifest));

        let snap = load_posterior(a.path().join(POSTERIOR_FILE)).unwrap();
        assert_eq!(snap, first.posterior);
        assert_eq!(snap.trials, 300);
    }

    #[test]
    fn tampered_manifest_is_rejected() {
        let cfg = parse_config(CFG).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let mut m = train(&cfg, dir.path()).unwrap().manifest;
        m.config.seed += 1;
        assert!(m.resolved_config().is_err());
    }

    #[test]
    fn report_matches_train_summary() {
        let cfg = parse_config(CFG).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = train(&cfg, dir.path()).unwrap();
        let recs = read_trials_csv(dir.path().join(TRIALS_FILE)).unwrap();
        let e = reference_enumeration(&cfg).unwrap();
        let rep = report(&recs, e.as_ref(), cfg.window()).unwrap();
        assert_eq!(rep.windows, out.summary.windows);
        assert_eq!(rep.cumulative_regret, out.summary.cumulative_regret);
    }
}
