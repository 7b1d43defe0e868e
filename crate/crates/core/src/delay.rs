//! Delay distributions for channels, center processing and human reaction.

use crate::rng::DrawStream;
use crate::time::SimTime;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub enum DelayModel {
    Constant(f64),
    Uniform { lo: f64, hi: f64 },
    Exponential { mean: f64 },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DelayError {
    #[error("delay parameters must be finite and nonnegative")]
    NegativeParameter,
    #[error("uniform delay requires lo <= hi (got lo={lo}, hi={hi})")]
    InvertedInterval { lo: f64, hi: f64 },
}

fn nonneg(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

impl DelayModel {
    /// Reaction profile used for human neurons that declare none.
    pub const DEFAULT_HUMAN_REACTION: DelayModel = DelayModel::Constant(1.0);

    pub fn validate(&self) -> Result<(), DelayError> {
        match *self {
            DelayModel::Constant(c) if !nonneg(c) => Err(DelayError::NegativeParameter),
            DelayModel::Uniform { lo, hi } if !nonneg(lo) || !nonneg(hi) => {
                Err(DelayError::NegativeParameter)
            }
            DelayModel::Uniform { lo, hi } if lo > hi => Err(DelayError::InvertedInterval { lo, hi }),
            DelayModel::Exponential { mean } if !nonneg(mean) => Err(DelayError::NegativeParameter),
            _ => Ok(()),
        }
    }

    /// Draws one delay. `Constant` consumes no randomness; the other kinds
    /// consume exactly one uniform draw.
    pub fn sample(&self, rng: &mut DrawStream) -> SimTime {
        SimTime::saturating_from_units(self.sample_units(rng))
    }

    pub fn sample_units(&self, rng: &mut DrawStream) -> f64 {
        match *self {
            DelayModel::Constant(c) => c,
            DelayModel::Uniform { lo, hi } => lo + rng.unit() * (hi - lo),
            // inverse CDF; 1 - u is in (0, 1]
            DelayModel::Exponential { mean } => -mean * libm::log(1.0 - rng.unit()),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DelayModel::Constant(c) => c,
            DelayModel::Uniform { lo, hi } => 0.5 * (lo + hi),
            DelayModel::Exponential { mean } => mean,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            DelayModel::Constant(_) => 0.0,
            DelayModel::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            DelayModel::Exponential { mean } => mean * mean,
        }
    }

    /// Same distribution family with every parameter multiplied by `k`.
    pub fn scaled(&self, k: f64) -> DelayModel {
        match *self {
            DelayModel::Constant(c) => DelayModel::Constant(c * k),
            DelayModel::Uniform { lo, hi } => DelayModel::Uniform { lo: lo * k, hi: hi * k },
            DelayModel::Exponential { mean } => DelayModel::Exponential { mean: mean * k },
        }
    }
}

/// Reaction delay of a human participant at its stage of an arc.
pub fn human_reaction_delay(profile: Option<&DelayModel>, rng: &mut DrawStream) -> SimTime {
    profile.unwrap_or(&DelayModel::DEFAULT_HUMAN_REACTION).sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng() -> DrawStream {
        DrawStream::from_seed(99)
    }

    #[test]
    fn constant_is_exact() {
        assert_eq!(DelayModel::Constant(2.5).sample(&mut rng()).as_units(), 2.5);
    }

    #[test]
    fn degenerate_uniform() {
        assert_eq!(DelayModel::Uniform { lo: 1.0, hi: 1.0 }.sample(&mut rng()).as_units(), 1.0);
    }

    #[test]
    fn exponential_mean_within_three_sigma() {
        let model = DelayModel::Exponential { mean: 2.0 };
        let mut r = rng();
        let n = 100_000;
        let sum: f64 = (0..n).map(|_| model.sample_units(&mut r)).sum();
        let mean = sum / n as f64;
        // sigma of an exponential equals its mean
        let tol = 3.0 * 2.0 / libm::sqrt(n as f64);
        assert!((mean - 2.0).abs() < tol, "mean {mean} tol {tol}");
    }

    #[test]
    fn uniform_samples_stay_in_interval() {
        let model = DelayModel::Uniform { lo: 0.5, hi: 1.5 };
        let mut r = rng();
        for _ in 0..1000 {
            let x = model.sample_units(&mut r);
            assert!((0.5..=1.5).contains(&x));
        }
    }

    #[test]
    fn validation() {
        assert!(DelayModel::Constant(-1.0).validate().is_err());
        assert!(DelayModel::Uniform { lo: 2.0, hi: 1.0 }.validate().is_err());
        assert!(DelayModel::Exponential { mean: f64::NAN }.validate().is_err());
        assert!(DelayModel::Exponential { mean: 0.0 }.validate().is_ok());
    }

    #[test]
    fn human_default_profile_is_one_unit() {
        assert_eq!(human_reaction_delay(None, &mut rng()).as_units(), 1.0);
        let instant = DelayModel::Constant(0.0);
        assert_eq!(human_reaction_delay(Some(&instant), &mut rng()), SimTime::ZERO);
    }
}
