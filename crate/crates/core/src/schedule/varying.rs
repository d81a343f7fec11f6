use crate::error::{Error, Result};
use crate::schedule::invariant::ScheduleResult;
use crate::schedule::root::{find_root, Budget};
use crate::schedule::sequence::Sequence;
use crate::schedule::simulate::simulate_schedule;
use crate::schedule::system::{EquivalentSpeeds, SystemConfig, TraceSet};
use crate::schedule::trace::SpeedTrace;

/// Iteration cap for each bracketed search.
pub const MAX_ITERATIONS: usize = 10_000;
/// Accepted relative deviation of `Σκ` from 1.
pub const SUM_TOLERANCE: f64 = 1e-10;
/// Accepted finish-time spread, relative to `max(1, T_f)`.
pub const SPREAD_TOLERANCE: f64 = 1e-8;

const OUTER_RESIDUAL: f64 = 1e-14;
const INNER_RESIDUAL: f64 = 1e-13;

/// Partition for time-varying speeds with every processor finishing at once.
///
/// Fixing the first worker's fraction fixes its finish time `f` by event
/// integration. Each later worker's completion time is continuous and
/// strictly increasing in its own fraction, so a bracketed search finds the
/// fraction that lands exactly on `f` (zero if the link is only free after
/// `f`). The outer search then moves the first fraction until the fractions
/// sum to one. The result is replayed by [`simulate_schedule`] and rejected
/// with a solver failure unless it meets [`SUM_TOLERANCE`] and
/// [`SPREAD_TOLERANCE`].
pub fn solve_time_varying(
    cfg: &SystemConfig,
    traces: &TraceSet,
    seq: &Sequence,
    release: f64,
) -> Result<ScheduleResult> {
    cfg.validate()?;
    traces.check(cfg)?;
    let n = cfg.n_workers();
    if seq.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: seq.len(),
        });
    }
    if !(release >= 0.0 && release.is_finite()) {
        return Err(Error::InvalidConfig(format!("release time {release} must be >= 0")));
    }

    let chain = Chain {
        cfg,
        traces,
        seq,
        release,
    };
    let mut kappa = vec![0.0; n];
    let mut kappa_control = 0.0;

    let at_one = chain.fill(1.0, &mut kappa, &mut kappa_control)?;
    let first = if at_one - 1.0 <= OUTER_RESIDUAL {
        1.0
    } else {
        let mut budget = Budget::new(MAX_ITERATIONS);
        let mut failure = None;
        let root = find_root(
            |k1| match chain.fill(k1, &mut kappa, &mut kappa_control) {
                Ok(total) => total - 1.0,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            0.0,
            1.0,
            -1.0,
            at_one - 1.0,
            OUTER_RESIDUAL,
            &mut budget,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        root?
    };
    let total = chain.fill(first, &mut kappa, &mut kappa_control)?;
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::SolverFailure(format!(
            "fractions sum to {total} after convergence"
        )));
    }

    let timeline = simulate_schedule(cfg, traces, seq, &kappa, kappa_control, release)?;
    let makespan = timeline.makespan();
    if !makespan.is_finite() {
        return Err(Error::SolverFailure("non-finite makespan".into()));
    }
    let spread = timeline.spread();
    if spread > SPREAD_TOLERANCE * makespan.abs().max(1.0) {
        return Err(Error::SolverFailure(format!(
            "finish times differ by {spread:e} (makespan {makespan})"
        )));
    }

    let equivalent_speeds = (0..n)
        .map(|w| {
            Ok(EquivalentSpeeds {
                z: equivalent_or_instant(
                    &traces.comm[w],
                    timeline.comm_start[w],
                    timeline.comm_end[w],
                )?,
                omega: equivalent_or_instant(
                    &traces.comp[w],
                    timeline.comm_end[w],
                    timeline.finish[w],
                )?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ScheduleResult {
        sequence: seq.clone(),
        kappa,
        kappa_control,
        finish_times: timeline.finish,
        control_finish: timeline.control_finish,
        makespan,
        equivalent_speeds,
    })
}

fn equivalent_or_instant(trace: &SpeedTrace, from: f64, to: f64) -> Result<f64> {
    if to > from {
        trace.equivalent_inverse_speed(from, to)
    } else {
        Ok(trace.inverse_speed_at(from))
    }
}

struct Chain<'a> {
    cfg: &'a SystemConfig,
    traces: &'a TraceSet,
    seq: &'a Sequence,
    release: f64,
}

impl Chain<'_> {
    /// Fills fractions implied by giving the first worker `first`; returns
    /// their sum.
    fn fill(&self, first: f64, kappa: &mut [f64], kappa_control: &mut f64) -> Result<f64> {
        let cfg = self.cfg;
        let order = self.seq.order();
        let w0 = order[0];
        let mut link_free = self.traces.comm[w0].advance(self.release, first * cfg.t_cm);
        let target = self.traces.comp[w0].advance(link_free, first * cfg.t_cp);
        kappa[w0] = first;
        let mut total = first;

        for &w in &order[1..] {
            let comm = &self.traces.comm[w];
            let comp = &self.traces.comp[w];
            let start = link_free;
            let completion = |k: f64| comp.advance(comm.advance(start, k * cfg.t_cm), k * cfg.t_cp);
            let k = fraction_finishing_at(completion, start - target, target)?;
            kappa[w] = k;
            total += k;
            link_free = comm.advance(start, k * cfg.t_cm);
        }

        *kappa_control = match (&self.traces.control, cfg.control_computes) {
            (Some(trace), true) => {
                let completion = |k: f64| trace.advance(self.release, k * cfg.t_cp);
                fraction_finishing_at(completion, self.release - target, target)?
            }
            _ => 0.0,
        };
        Ok(total + *kappa_control)
    }
}

/// Fraction in `[0, 1]` whose completion lands on `target`; `at_zero` is
/// `completion(0) - target`.
fn fraction_finishing_at<F>(completion: F, at_zero: f64, target: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if at_zero >= 0.0 {
        return Ok(0.0);
    }
    let at_one = completion(1.0) - target;
    if at_one <= 0.0 {
        return Ok(1.0);
    }
    let tol = INNER_RESIDUAL * target.abs().max(1.0);
    let mut budget = Budget::new(MAX_ITERATIONS);
    find_root(
        |k| completion(k) - target,
        0.0,
        1.0,
        at_zero,
        at_one,
        tol,
        &mut budget,
    )
}
