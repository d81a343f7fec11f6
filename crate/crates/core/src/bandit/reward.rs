use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{SystemConfig, TraceSet};

/// How the per-trial finishing-time bound `T_f^max` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RewardNormalizer {
    /// Time for a single processor to receive and compute the whole load.
    #[default]
    SingleProcessorEstimate,
    FixedBound { value: f64 },
    /// Largest finishing time observed so far, current trial included.
    AdaptiveMaxObserved,
}

impl RewardNormalizer {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RewardNormalizer::FixedBound { value } if !(value > 0.0 && value.is_finite()) => {
                Err(Error::InvalidConfig(format!(
                    "fixed reward bound {value} must be positive"
                )))
            }
            _ => Ok(()),
        }
    }

    /// `T_f^max` for one trial.
    ///
    /// With constant speeds (`traces` is `None`) the single-processor
    /// estimate is `T_cm·max z + T_cp·max ω`. With realised traces it is the
    /// slowest worker's time to receive and then compute the whole load
    /// alone on its own traces, starting at `release`. `observed_max` feeds
    /// the adaptive strategy.
    pub fn tf_max(
        &self,
        cfg: &SystemConfig,
        traces: Option<&TraceSet>,
        release: f64,
        observed_max: Option<f64>,
    ) -> Result<f64> {
        match *self {
            RewardNormalizer::SingleProcessorEstimate => Ok(match traces {
                None => {
                    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    cfg.t_cm * max(&cfg.z) + cfg.t_cp * max(&cfg.omega)
                }
                Some(tr) => {
                    tr.comm
                        .iter()
                        .zip(&tr.comp)
                        .map(|(comm, comp)| {
                            let received = comm.advance(release, cfg.t_cm);
                            comp.advance(received, cfg.t_cp)
                        })
                        .fold(f64::NEG_INFINITY, f64::max)
                        - release
                }
            }),
            RewardNormalizer::FixedBound { value } => Ok(value),
            RewardNormalizer::AdaptiveMaxObserved => observed_max
                .filter(|m| *m > 0.0)
                .ok_or_else(|| {
                    Error::InvalidConfig("adaptive bound needs at least one observation".into())
                }),
        }
    }
}

/// `min(tf / tf_max, 1)`: the success probability of the trial's Bernoulli
/// draw.
pub fn normalize_reward(tf: f64, tf_max: f64) -> Result<f64> {
    if !(tf > 0.0 && tf_max > 0.0) || !tf.is_finite() || !tf_max.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "finishing time {tf} and bound {tf_max} must be positive"
        )));
    }
    Ok((tf / tf_max).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> SystemConfig {
        let s = vec![1.0, 2.0, 9.0, 16.0];
        SystemConfig::new(s.clone(), s, 1.0, 4.0).unwrap()
    }

    #[test]
    fn single_processor_bound_of_reference_system() {
        let b = RewardNormalizer::SingleProcessorEstimate;
        assert_eq!(b.tf_max(&reference(), None, 0.0, None).unwrap(), 80.0);
        // same value from constant traces, since one worker is slowest on both
        let traces = TraceSet::nominal(&reference()).unwrap();
        assert_eq!(b.tf_max(&reference(), Some(&traces), 0.0, None).unwrap(), 80.0);
    }

    #[test]
    fn fixed_and_adaptive_bounds() {
        let fixed = RewardNormalizer::FixedBound { value: 10.0 };
        assert_eq!(fixed.tf_max(&reference(), None, 0.0, Some(99.0)).unwrap(), 10.0);
        let adaptive = RewardNormalizer::AdaptiveMaxObserved;
        let running = [3.0, 7.0, 5.0].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(adaptive.tf_max(&reference(), None, 0.0, Some(running)).unwrap(), 7.0);
        assert!(adaptive.tf_max(&reference(), None, 0.0, None).is_err());
        assert!(RewardNormalizer::FixedBound { value: 0.0 }.validate().is_err());
    }

    #[test]
    fn normalisation_clamps_at_one() {
        assert!((normalize_reward(3.0, 5.0).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(normalize_reward(7.0, 5.0).unwrap(), 1.0);
        assert_eq!(normalize_reward(5.0, 5.0).unwrap(), 1.0);
        assert!(normalize_reward(0.0, 5.0).is_err());
        assert!(normalize_reward(1.0, -5.0).is_err());
    }
}
