use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{HorizonBehavior, SpeedTrace, SystemConfig, TraceSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Redraw {
    /// A fresh background-job count for every unit interval.
    #[default]
    PerUnitInterval,
    /// One count held over the whole horizon.
    SingleDraw,
}

/// Random background load on each shared link and processor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackgroundJobModel {
    pub min_jobs: u64,
    pub max_jobs: u64,
    /// Length of the generated pattern, in time units.
    pub horizon: u32,
    pub redraw: Redraw,
    pub horizon_behavior: HorizonBehavior,
}

impl Default for BackgroundJobModel {
    fn default() -> Self {
        BackgroundJobModel {
            min_jobs: 10,
            max_jobs: 200,
            horizon: 40,
            redraw: Redraw::PerUnitInterval,
            horizon_behavior: HorizonBehavior::HoldLast,
        }
    }
}

impl BackgroundJobModel {
    pub fn validate(&self) -> Result<()> {
        if self.min_jobs > self.max_jobs {
            return Err(Error::InvalidConfig(format!(
                "min_jobs {} exceeds max_jobs {}",
                self.min_jobs, self.max_jobs
            )));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be positive".into()));
        }
        Ok(())
    }

    fn trace<R: Rng + ?Sized>(&self, base: f64, rng: &mut R) -> Result<SpeedTrace> {
        // the job of interest plus k - 1 background jobs share the resource
        let mut draw = || rng.gen_range(self.min_jobs + 1..=self.max_jobs + 1);
        match self.redraw {
            Redraw::PerUnitInterval => {
                let counts = (0..self.horizon).map(|_| draw()).collect();
                SpeedTrace::unit_segments(counts, base, self.horizon_behavior)
            }
            Redraw::SingleDraw => SpeedTrace::new(
                vec![0.0],
                vec![draw()],
                base,
                f64::from(self.horizon),
                self.horizon_behavior,
            ),
        }
    }
}

/// Draws link and compute traces for every worker (link first, then
/// compute, worker by worker), then the control processor's compute trace
/// when it participates.
pub fn generate_traces<R: Rng + ?Sized>(
    model: &BackgroundJobModel,
    system: &SystemConfig,
    rng: &mut R,
) -> Result<TraceSet> {
    model.validate()?;
    let n = system.n_workers();
    let mut comm = Vec::with_capacity(n);
    let mut comp = Vec::with_capacity(n);
    for w in 0..n {
        comm.push(model.trace(system.z[w], rng)?);
        comp.push(model.trace(system.omega[w], rng)?);
    }
    let control = if system.control_computes {
        Some(model.trace(system.omega0, rng)?)
    } else {
        None
    };
    Ok(TraceSet {
        comm,
        comp,
        control,
    })
}
