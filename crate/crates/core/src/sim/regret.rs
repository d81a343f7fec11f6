use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::TrialRecord;

/// `Σ_t (T_f(t) − T_f*)` over all records.
pub fn cumulative_regret(records: &[TrialRecord], t_f_star: f64) -> Result<f64> {
    check_reference(t_f_star)?;
    Ok(records.iter().map(|r| r.makespan - t_f_star).sum())
}

/// Mean excess finishing time over trials `t1..=t2` (one-based).
pub fn windowed_regret(records: &[TrialRecord], t_f_star: f64, t1: usize, t2: usize) -> Result<f64> {
    check_reference(t_f_star)?;
    let slice = window_slice(records, t1, t2)?;
    Ok(slice.iter().map(|r| r.makespan - t_f_star).sum::<f64>() / slice.len() as f64)
}

/// Mean finishing time over trials `t1..=t2` (one-based).
pub fn windowed_makespan(records: &[TrialRecord], t1: usize, t2: usize) -> Result<f64> {
    let slice = window_slice(records, t1, t2)?;
    Ok(slice.iter().map(|r| r.makespan).sum::<f64>() / slice.len() as f64)
}

fn window_slice(records: &[TrialRecord], t1: usize, t2: usize) -> Result<&[TrialRecord]> {
    if t1 == 0 || t1 > t2 || t2 > records.len() {
        return Err(Error::InvalidWindow {
            t1,
            t2,
            len: records.len(),
        });
    }
    Ok(&records[t1 - 1..t2])
}

fn check_reference(t_f_star: f64) -> Result<()> {
    if !(t_f_star > 0.0 && t_f_star.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "reference finishing time {t_f_star} must be positive"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowStat {
    /// One-based trial bounds, inclusive.
    pub start: usize,
    pub end: usize,
    pub mean_makespan: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_regret: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub window: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_f_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cumulative_regret: Option<f64>,
    pub windows: Vec<WindowStat>,
}

impl RegretReport {
    /// Consecutive windows of `window` trials (the last may be shorter);
    /// a window longer than the run collapses to a single window. Regret
    /// columns are present only when `t_f_star` is known.
    pub fn build(records: &[TrialRecord], t_f_star: Option<f64>, window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidConfig("window must be at least 1".into()));
        }
        if let Some(star) = t_f_star {
            check_reference(star)?;
        }
        let width = window.min(records.len().max(1));
        let mut windows = Vec::new();
        let mut start = 1;
        while start <= records.len() {
            let end = (start + width - 1).min(records.len());
            windows.push(WindowStat {
                start,
                end,
                mean_makespan: windowed_makespan(records, start, end)?,
                mean_regret: t_f_star
                    .map(|s| windowed_regret(records, s, start, end))
                    .transpose()?,
            });
            start = end + 1;
        }
        Ok(RegretReport {
            window: width,
            t_f_star,
            cumulative_regret: t_f_star.map(|s| cumulative_regret(records, s)).transpose()?,
            windows,
        })
    }

    pub fn first(&self) -> Option<&WindowStat> {
        self.windows.first()
    }

    pub fn last(&self) -> Option<&WindowStat> {
        self.windows.last()
    }
}
