use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::sequence::Sequence;
use crate::schedule::system::{EquivalentSpeeds, SystemConfig};

/// Load partition for one sequence with all processors finishing together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleResult {
    pub sequence: Sequence,
    /// Load fraction per worker (indexed by worker, not by position).
    pub kappa: Vec<f64>,
    /// Fraction kept by the control processor; zero unless it computes.
    pub kappa_control: f64,
    /// Completion time per worker.
    pub finish_times: Vec<f64>,
    pub control_finish: Option<f64>,
    /// Completion of the whole load.
    pub makespan: f64,
    /// Equivalent constant speeds each worker saw over its reception and
    /// computation intervals.
    pub equivalent_speeds: Vec<EquivalentSpeeds>,
}

impl ScheduleResult {
    /// Largest gap between two completion times.
    pub fn spread(&self) -> f64 {
        let times = self.finish_times.iter().copied().chain(self.control_finish);
        let (lo, hi) = times.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
            (lo.min(t), hi.max(t))
        });
        hi - lo
    }

    pub fn kappa_total(&self) -> f64 {
        self.kappa.iter().sum::<f64>() + self.kappa_control
    }
}

/// Closed-form partition for constant speeds.
///
/// With workers relabelled by position, the first one finishes at
/// `κ₁(z₁T_cm + ω₁T_cp)` and each successor must satisfy
/// `κ_i(z_iT_cm + ω_iT_cp) = κ_{i−1}ω_{i−1}T_cp` so that it completes at the
/// same instant; a computing control processor adds `κ₀ω₀T_cp = T_f`.
/// Fractions are solved relative to `κ₁ = 1` and then normalised.
pub fn solve_time_invariant(cfg: &SystemConfig, seq: &Sequence) -> Result<ScheduleResult> {
    cfg.validate()?;
    let n = cfg.n_workers();
    if seq.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: seq.len(),
        });
    }
    let order = seq.order();
    let mut relative = vec![0.0; n];
    relative[order[0]] = 1.0;
    for pair in order.windows(2) {
        let (prev, cur) = (pair[0], pair[1]);
        relative[cur] = relative[prev] * cfg.omega[prev] * cfg.t_cp
            / (cfg.z[cur] * cfg.t_cm + cfg.omega[cur] * cfg.t_cp);
    }
    let first = order[0];
    let relative_finish = cfg.z[first] * cfg.t_cm + cfg.omega[first] * cfg.t_cp;
    let relative_control = if cfg.control_computes {
        relative_finish / (cfg.omega0 * cfg.t_cp)
    } else {
        0.0
    };
    let total: f64 = relative.iter().sum::<f64>() + relative_control;
    let kappa: Vec<f64> = relative.iter().map(|k| k / total).collect();
    let kappa_control = relative_control / total;
    let makespan = relative_finish / total;

    // Completion times follow the transmission chain, matching what an
    // event replay with constant speeds produces.
    let mut finish_times = vec![0.0; n];
    let mut link_free = 0.0;
    for &w in order {
        link_free += kappa[w] * cfg.z[w] * cfg.t_cm;
        finish_times[w] = link_free + kappa[w] * cfg.omega[w] * cfg.t_cp;
    }
    let control_finish = cfg
        .control_computes
        .then_some(kappa_control * cfg.omega0 * cfg.t_cp);

    Ok(ScheduleResult {
        sequence: seq.clone(),
        kappa,
        kappa_control,
        finish_times,
        control_finish,
        makespan,
        equivalent_speeds: cfg
            .z
            .iter()
            .zip(&cfg.omega)
            .map(|(&z, &omega)| EquivalentSpeeds { z, omega })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_worker_takes_everything() {
        let cfg = SystemConfig::new(vec![1.0], vec![1.0], 1.0, 4.0).unwrap();
        let r = solve_time_invariant(&cfg, &Sequence::identity(1)).unwrap();
        assert_eq!(r.kappa, vec![1.0]);
        assert_eq!(r.makespan, 5.0);
    }

    #[test]
    fn two_workers_by_hand() {
        // κ₂ = 4κ₁/10, so κ = (5/7, 2/7) and T_f = 5κ₁ = 25/7
        let cfg = SystemConfig::new(vec![1.0, 2.0], vec![1.0, 2.0], 1.0, 4.0).unwrap();
        let r = solve_time_invariant(&cfg, &Sequence::identity(2)).unwrap();
        assert!((r.kappa[0] - 5.0 / 7.0).abs() < 1e-15);
        assert!((r.kappa[1] - 2.0 / 7.0).abs() < 1e-15);
        assert!((r.makespan - 25.0 / 7.0).abs() < 1e-15);
        assert!(r.spread() < 1e-15);
    }

    #[test]
    fn four_worker_reference_system() {
        let speeds = vec![1.0, 2.0, 9.0, 16.0];
        let cfg = SystemConfig::new(speeds.clone(), speeds, 1.0, 4.0).unwrap();
        let r = solve_time_invariant(&cfg, &Sequence::identity(4)).unwrap();
        let expected = [0.665287, 0.266115, 0.047309, 0.021289];
        for (k, e) in r.kappa.iter().zip(expected) {
            assert!((k - e).abs() < 5e-7, "{k} vs {e}");
        }
        // T_f = κ₁(z₁T_cm + ω₁T_cp) = 5κ₁
        assert!((r.makespan - 3.326434062684802).abs() < 1e-12);
        assert!((r.kappa_total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn control_processor_shares_the_finish() {
        let cfg = SystemConfig::new(vec![1.0, 2.0], vec![1.0, 2.0], 1.0, 4.0)
            .unwrap()
            .with_control(2.0)
            .unwrap();
        let r = solve_time_invariant(&cfg, &Sequence::identity(2)).unwrap();
        assert!((r.kappa_total() - 1.0).abs() < 1e-12);
        assert!(r.kappa_control > 0.0);
        assert!(r.spread() < 1e-12);
        assert!((r.control_finish.unwrap() - r.makespan).abs() < 1e-12);
    }

    #[test]
    fn rejects_mismatched_sequence() {
        let cfg = SystemConfig::new(vec![1.0, 2.0], vec![1.0, 2.0], 1.0, 4.0).unwrap();
        assert!(solve_time_invariant(&cfg, &Sequence::identity(3)).is_err());
    }
}
