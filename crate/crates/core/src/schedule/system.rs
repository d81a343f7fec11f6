use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::trace::SpeedTrace;

/// A single-level tree: one control processor feeding `N` workers over a
/// shared sequential link. Speeds are inverse (time per unit load).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Inverse compute speed of each worker.
    pub omega: Vec<f64>,
    /// Inverse link speed to each worker.
    pub z: Vec<f64>,
    /// Time to transmit the whole load over a link with `z = 1`.
    pub t_cm: f64,
    /// Time to compute the whole load on a processor with `omega = 1`.
    pub t_cp: f64,
    /// Whether the control processor keeps a share of the load for itself.
    pub control_computes: bool,
    /// Inverse compute speed of the control processor.
    pub omega0: f64,
}

impl SystemConfig {
    pub fn new(omega: Vec<f64>, z: Vec<f64>, t_cm: f64, t_cp: f64) -> Result<Self> {
        let cfg = SystemConfig {
            omega,
            z,
            t_cm,
            t_cp,
            control_computes: false,
            omega0: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_control(mut self, omega0: f64) -> Result<Self> {
        self.control_computes = true;
        self.omega0 = omega0;
        self.validate()?;
        Ok(self)
    }

    pub fn n_workers(&self) -> usize {
        self.omega.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.omega.len();
        if n == 0 {
            return Err(Error::InvalidConfig("at least one worker is required".into()));
        }
        if self.z.len() != n {
            return Err(Error::InvalidConfig(format!(
                "omega has {n} entries but z has {}",
                self.z.len()
            )));
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if let Some(i) = self.omega.iter().position(|&v| !positive(v)) {
            return Err(Error::InvalidConfig(format!(
                "omega[{i}] = {} must be positive",
                self.omega[i]
            )));
        }
        if let Some(i) = self.z.iter().position(|&v| !positive(v)) {
            return Err(Error::InvalidConfig(format!(
                "z[{i}] = {} must be positive",
                self.z[i]
            )));
        }
        if !positive(self.t_cm) || !positive(self.t_cp) {
            return Err(Error::InvalidConfig("t_cm and t_cp must be positive".into()));
        }
        if self.control_computes && !positive(self.omega0) {
            return Err(Error::InvalidConfig("omega0 must be positive".into()));
        }
        Ok(())
    }
}

/// Per-processor speed traces for one scheduling instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSet {
    /// Link traces, indexed by worker.
    pub comm: Vec<SpeedTrace>,
    /// Compute traces, indexed by worker.
    pub comp: Vec<SpeedTrace>,
    /// Compute trace of the control processor, when it participates.
    pub control: Option<SpeedTrace>,
}

impl TraceSet {
    /// Constant traces at the nominal speeds of `cfg`.
    pub fn nominal(cfg: &SystemConfig) -> Result<Self> {
        Ok(TraceSet {
            comm: cfg
                .z
                .iter()
                .map(|&z| SpeedTrace::constant(z))
                .collect::<Result<_>>()?,
            comp: cfg
                .omega
                .iter()
                .map(|&w| SpeedTrace::constant(w))
                .collect::<Result<_>>()?,
            control: if cfg.control_computes {
                Some(SpeedTrace::constant(cfg.omega0)?)
            } else {
                None
            },
        })
    }

    pub(crate) fn check(&self, cfg: &SystemConfig) -> Result<()> {
        let n = cfg.n_workers();
        if self.comm.len() != n || self.comp.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: self.comm.len().min(self.comp.len()),
            });
        }
        if cfg.control_computes && self.control.is_none() {
            return Err(Error::InvalidTrace(
                "control processor computes but has no trace".into(),
            ));
        }
        Ok(())
    }
}

/// Equivalent constant inverse speeds realised by one worker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalentSpeeds {
    pub z: f64,
    pub omega: f64,
}
