//! Event-driven replay of a schedule on explicit speed traces.
//!
//! The control processor sends to one worker at a time in sequence order.
//! Reception for worker `i` starts when reception for its predecessor ends
//! and lasts until `kappa_i * T_cm` units have crossed the link; computing
//! starts at reception end and lasts until `kappa_i * T_cp` units are done.
//! This is independent of the closed-form and fixed-point solvers and is
//! used to check both.

use crate::error::{Error, Result};
use crate::schedule::sequence::Sequence;
use crate::schedule::system::{SystemConfig, TraceSet};

/// Allowed deviation of `Σκ` from 1 when accepting an allocation.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Timeline {
    /// Reception start per worker.
    pub comm_start: Vec<f64>,
    /// Reception end per worker.
    pub comm_end: Vec<f64>,
    /// Completion time per worker.
    pub finish: Vec<f64>,
    /// Completion of the control processor's own share.
    pub control_finish: Option<f64>,
}

impl Timeline {
    /// Latest completion over every processor.
    pub fn makespan(&self) -> f64 {
        self.finish
            .iter()
            .copied()
            .chain(self.control_finish)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest gap between two completion times.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .finish
            .iter()
            .copied()
            .chain(self.control_finish)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
                (lo.min(t), hi.max(t))
            });
        hi - lo
    }
}

pub(crate) fn check_allocation(kappa: &[f64], kappa_control: f64, n: usize) -> Result<()> {
    if kappa.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: kappa.len(),
        });
    }
    if kappa
        .iter()
        .chain(std::iter::once(&kappa_control))
        .any(|&k| !(k >= 0.0) || !k.is_finite())
    {
        return Err(Error::InvalidAllocation(format!(
            "fractions must be finite and non-negative: {kappa:?}, control {kappa_control}"
        )));
    }
    let total: f64 = kappa.iter().sum::<f64>() + kappa_control;
    if (total - 1.0).abs() > SIMPLEX_TOLERANCE {
        return Err(Error::InvalidAllocation(format!(
            "fractions sum to {total}, not 1"
        )));
    }
    Ok(())
}

/// Replays `kappa` (indexed by worker) on `traces`, starting at `release`.
pub fn simulate_schedule(
    cfg: &SystemConfig,
    traces: &TraceSet,
    seq: &Sequence,
    kappa: &[f64],
    kappa_control: f64,
    release: f64,
) -> Result<Timeline> {
    let n = cfg.n_workers();
    if seq.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: seq.len(),
        });
    }
    traces.check(cfg)?;
    check_allocation(kappa, kappa_control, n)?;
    if !cfg.control_computes && kappa_control != 0.0 {
        return Err(Error::InvalidAllocation(
            "control processor does not compute but was given load".into(),
        ));
    }

    let mut comm_start = vec![0.0; n];
    let mut comm_end = vec![0.0; n];
    let mut finish = vec![0.0; n];
    let mut link_free = release;
    for &w in seq.order() {
        let received = traces.comm[w].advance(link_free, kappa[w] * cfg.t_cm);
        comm_start[w] = link_free;
        comm_end[w] = received;
        finish[w] = traces.comp[w].advance(received, kappa[w] * cfg.t_cp);
        link_free = received;
    }
    let control_finish = match (&traces.control, cfg.control_computes) {
        (Some(trace), true) => Some(trace.advance(release, kappa_control * cfg.t_cp)),
        _ => None,
    };
    Ok(Timeline {
        comm_start,
        comm_end,
        finish,
        control_finish,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::trace::{HorizonBehavior, SpeedTrace};

    #[test]
    fn single_worker_with_slowdown() {
        let cfg = SystemConfig::new(vec![1.0], vec![1.0], 1.0, 4.0).unwrap();
        let traces = TraceSet {
            comm: vec![SpeedTrace::constant(1.0).unwrap()],
            comp: vec![SpeedTrace::new(
                vec![0.0, 2.0],
                vec![1, 2],
                1.0,
                3.0,
                HorizonBehavior::HoldLast,
            )
            .unwrap()],
            control: None,
        };
        let tl =
            simulate_schedule(&cfg, &traces, &Sequence::identity(1), &[1.0], 0.0, 0.0).unwrap();
        assert_eq!(tl.comm_end, vec![1.0]);
        assert_eq!(tl.finish, vec![8.0]);
    }

    #[test]
    fn rejects_allocations_off_the_simplex() {
        let cfg = SystemConfig::new(vec![1.0, 2.0], vec![1.0, 2.0], 1.0, 4.0).unwrap();
        let traces = TraceSet::nominal(&cfg).unwrap();
        let seq = Sequence::identity(2);
        let err = simulate_schedule(&cfg, &traces, &seq, &[0.5, 0.6], 0.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::InvalidAllocation(_)));
        let err = simulate_schedule(&cfg, &traces, &seq, &[1.5, -0.5], 0.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::InvalidAllocation(_)));
        let err = simulate_schedule(&cfg, &traces, &seq, &[0.5, 0.25], 0.25, 0.0).unwrap_err();
        assert!(matches!(err, Error::InvalidAllocation(_)));
    }
}
