use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Beta posterior over the latent Bernoulli mean of one arm or weight entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBeta")]
pub struct BetaParams {
    alpha: f64,
    beta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBeta {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawBeta> for BetaParams {
    type Error = Error;

    fn try_from(raw: RawBeta) -> Result<Self> {
        BetaParams::new(raw.alpha, raw.beta)
    }
}

impl Default for BetaParams {
    fn default() -> Self {
        BetaParams::UNIFORM
    }
}

impl BetaParams {
    /// The uniform prior `Beta(1, 1)`.
    pub const UNIFORM: BetaParams = BetaParams {
        alpha: 1.0,
        beta: 1.0,
    };

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "Beta parameters must be finite and non-negative, got ({alpha}, {beta})"
            )));
        }
        Ok(BetaParams { alpha, beta })
    }

    /// Like [`BetaParams::new`] but rejects zeros, which make an improper
    /// prior.
    pub fn proper(alpha: f64, beta: f64) -> Result<Self> {
        let p = BetaParams::new(alpha, beta)?;
        if alpha == 0.0 || beta == 0.0 {
            return Err(Error::InvalidConfig(format!(
                "Beta({alpha}, {beta}) is an improper prior; both parameters must be positive"
            )));
        }
        Ok(p)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        let total = self.alpha + self.beta;
        if total == 0.0 {
            0.5
        } else {
            self.alpha / total
        }
    }

    /// Conjugate update after one Bernoulli outcome.
    #[must_use]
    pub fn bernoulli_update(self, success: bool) -> Self {
        if success {
            BetaParams {
                alpha: self.alpha + 1.0,
                ..self
            }
        } else {
            BetaParams {
                beta: self.beta + 1.0,
                ..self
            }
        }
    }

    /// One posterior draw. Zero parameters are treated as their limiting
    /// point masses.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match (self.alpha == 0.0, self.beta == 0.0) {
            (true, true) => 0.5,
            (true, false) => 0.0,
            (false, true) => 1.0,
            (false, false) => Beta::new(self.alpha, self.beta)
                .expect("positive finite parameters")
                .sample(rng),
        }
    }
}
