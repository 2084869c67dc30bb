use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::RandomSource;

/// Imperfect detector: loses the event with probability `no_click_prob`,
/// otherwise reports `preferred` with probability `stick_prob` and the true
/// outcome with the remaining probability.
///
/// On a fair binary input with `preferred = 1` the reported marginal is
/// `P(1) = 1/2 + stick_prob / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub stick_prob: f64,
    pub preferred: usize,
    pub no_click_prob: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self::IDEAL
    }
}

impl DetectorModel {
    pub const IDEAL: DetectorModel = DetectorModel {
        stick_prob: 0.0,
        preferred: 0,
        no_click_prob: 0.0,
    };

    pub fn new(stick_prob: f64, preferred: usize, no_click_prob: f64) -> Result<Self> {
        let det = Self {
            stick_prob,
            preferred,
            no_click_prob,
        };
        det.validate()?;
        Ok(det)
    }

    /// Sticky detector with a marginal bias of `bias` toward outcome 1 on fair bits.
    pub fn biased_toward_one(bias: f64) -> Result<Self> {
        Self::new(2.0 * bias, 1, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.stick_prob) {
            return Err(Error::InvalidDetector(format!(
                "stick probability {} outside [0, 1]",
                self.stick_prob
            )));
        }
        if !(0.0..1.0).contains(&self.no_click_prob) {
            return Err(Error::InvalidDetector(format!(
                "no-click probability {} outside [0, 1)",
                self.no_click_prob
            )));
        }
        Ok(())
    }

    pub fn validate_for(&self, dim: usize) -> Result<()> {
        self.validate()?;
        if self.preferred >= dim {
            return Err(Error::InvalidDetector(format!(
                "preferred outcome {} outside 0..{dim}",
                self.preferred
            )));
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.stick_prob == 0.0 && self.no_click_prob == 0.0
    }
}

/// Passes a true outcome through the detector; `None` is a no-click.
#[inline]
pub fn apply_detector(outcome: usize, det: &DetectorModel, rng: &mut RandomSource) -> Option<usize> {
    if rng.bernoulli(det.no_click_prob) {
        return None;
    }
    if rng.bernoulli(det.stick_prob) {
        return Some(det.preferred);
    }
    Some(outcome)
}
