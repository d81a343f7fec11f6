use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bandit::Recommendation;
use crate::error::{Error, Result};
use crate::schedule::Sequence;
use crate::sim::{Enumeration, RegretReport, TrialRecord, WindowStat};

/// Figure data for one run: windowed means and, when the optimum is known,
/// regret.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub window: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_f_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_sequence: Option<Sequence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cumulative_regret: Option<f64>,
    pub windows: Vec<WindowStat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recommended: Option<Recommendation>,
}

impl Summary {
    pub fn build(
        records: &[TrialRecord],
        enumeration: Option<&Enumeration>,
        window: usize,
        recommended: Option<Recommendation>,
    ) -> Result<Self> {
        let best = enumeration.map(|e| e.best());
        let report = RegretReport::build(records, best.map(|b| b.makespan), window)?;
        Ok(Summary {
            trials: records.len(),
            window: report.window,
            t_f_star: report.t_f_star,
            optimal_sequence: best.map(|b| b.sequence.clone()),
            cumulative_regret: report.cumulative_regret,
            windows: report.windows,
            recommended,
        })
    }
}

pub(crate) fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub(crate) fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<Vec<u8>> {
    let bytes = json_bytes(value)?;
    std::fs::write(path, &bytes).map_err(|e| Error::io(path, e))?;
    Ok(bytes)
}

pub fn emit_summary(
    records: &[TrialRecord],
    enumeration: Option<&Enumeration>,
    window: usize,
    recommended: Option<Recommendation>,
    path: impl AsRef<Path>,
) -> Result<Summary> {
    let summary = Summary::build(records, enumeration, window, recommended)?;
    write_json(&summary, path.as_ref())?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::trials::{parse_trials_csv, trials_csv_bytes};
    use crate::schedule::SystemConfig;
    use crate::sim::{enumerate_sequences, run_experiment, ExperimentConfig};

    #[test]
    fn summary_recomputes_from_csv() {
        let s = vec![1.0, 2.0, 9.0, 16.0];
        let system = SystemConfig::new(s.clone(), s, 1.0, 4.0).unwrap();
        let mut cfg = ExperimentConfig::new(system.clone());
        cfg.trials = 750;
        let (recs, learner) = run_experiment(&cfg).unwrap();
        let e = enumerate_sequences(&system, 8).unwrap();
        let direct = Summary::build(&recs, Some(&e), 100, Some(learner.recommend())).unwrap();
        assert_eq!(direct.windows.len(), 8);
        let reread = parse_trials_csv(&trials_csv_bytes(&recs).unwrap()).unwrap();
        let again = Summary::build(&reread, Some(&e), 100, Some(learner.recommend())).unwrap();
        for (a, b) in direct.windows.iter().zip(&again.windows) {
            assert!((a.mean_makespan - b.mean_makespan).abs() <= 1e-12);
            assert!((a.mean_regret.unwrap() - b.mean_regret.unwrap()).abs() <= 1e-12);
        }
        let back: Summary = serde_json::from_slice(&json_bytes(&direct).unwrap()).unwrap();
        assert_eq!(back, direct);
    }
}
