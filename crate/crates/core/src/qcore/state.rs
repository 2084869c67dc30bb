use nalgebra::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Normalization tolerance on stored pure states.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance on the total mass of an outcome distribution.
pub const PROB_SUM_TOL: f64 = 1e-10;
/// Born probabilities this far below zero (or above one) are floating-point dust.
pub const PROB_DUST: f64 = 1e-12;

fn check_finite(amps: &[C64], what: &'static str) -> Result<()> {
    if amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

fn check_norm(amps: &[C64]) -> Result<()> {
    let n2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if (n2 - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n2));
    }
    Ok(())
}

/// Pure state of a single d-level system.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidDimension(amps.len()));
        }
        check_finite(&amps, "state vector")?;
        check_norm(&amps)?;
        Ok(Self { amps })
    }

    /// Rescales `amps` to unit norm before validating.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        check_finite(&amps, "state vector")?;
        let n = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        amps.iter_mut().for_each(|z| *z /= n);
        Self::new(amps)
    }

    /// Computational basis vector `e_index`.
    pub fn basis_vector(dim: usize, index: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }
}

/// Pure state of a bipartite system; amplitude of `(a, b)` lives at `a * dim_b + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    dim_a: usize,
    dim_b: usize,
    amps: Vec<C64>,
}

impl JointState {
    pub fn new(dim_a: usize, dim_b: usize, amps: Vec<C64>) -> Result<Self> {
        for d in [dim_a, dim_b] {
            if d < 2 {
                return Err(Error::InvalidDimension(d));
            }
        }
        if amps.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                got: amps.len(),
            });
        }
        check_finite(&amps, "joint state")?;
        check_norm(&amps)?;
        Ok(Self { dim_a, dim_b, amps })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    #[inline]
    pub fn amp(&self, a: usize, b: usize) -> C64 {
        self.amps[a * self.dim_b + b]
    }
}

/// Probabilities over an ordered list of outcomes, with a precomputed CDF for
/// inverse-transform sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0 || **p > 1.0) {
            return Err(Error::InvalidDistribution(format!("probability {p} outside [0, 1]")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        let cdf = cumulative(&probs);
        Ok(Self { probs, cdf })
    }

    /// Builds a distribution from raw squared moduli: dust in
    /// `[-1e-12, 0)` is clamped to zero, values up to `1 + 1e-12` to one,
    /// and the result is renormalized.
    pub fn from_born(raw: Vec<f64>) -> Result<Self> {
        let mut probs = Vec::with_capacity(raw.len());
        for p in raw {
            if !p.is_finite() || !(-PROB_DUST..=1.0 + PROB_DUST).contains(&p) {
                return Err(Error::InvalidDistribution(format!("Born weight {p}")));
            }
            probs.push(p.clamp(0.0, 1.0));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!("Born weights sum to {total}")));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Self::new(probs)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Inverse CDF in stored order for `u` in `(0, 1]`.
    #[inline]
    pub fn invert(&self, u: f64) -> usize {
        // cdf is pinned to exactly 1.0 from the last positive entry on, so the
        // scan always terminates on an outcome with nonzero probability.
        self.cdf.iter().position(|&c| u <= c).unwrap_or(self.cdf.len() - 1)
    }
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    if let Some(last) = probs.iter().rposition(|&p| p > 0.0) {
        cdf[last..].iter_mut().for_each(|c| *c = 1.0);
    }
    cdf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized_state() {
        let r = StateVector::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(r, Err(Error::NotNormalized(_))));
    }

    #[test]
    fn rejects_nan() {
        let r = StateVector::new(vec![C64::new(f64::NAN, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn rejects_one_dimensional_state() {
        assert!(StateVector::new(vec![C64::new(1.0, 0.0)]).is_err());
        assert!(StateVector::basis_vector(3, 3).is_err());
    }

    #[test]
    fn joint_state_length_checked() {
        let amps = vec![C64::new(0.5, 0.0); 4];
        assert!(JointState::new(2, 2, amps.clone()).is_ok());
        assert!(JointState::new(2, 3, amps).is_err());
    }

    #[test]
    fn born_dust_clamped() {
        let d = OutcomeDistribution::from_born(vec![-1e-13, 0.5, 0.5 + 1e-13]).unwrap();
        assert_eq!(d.probs()[0], 0.0);
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(OutcomeDistribution::from_born(vec![-1e-6, 1.0]).is_err());
    }

    #[test]
    fn invert_skips_zero_mass() {
        let d = OutcomeDistribution::new(vec![0.0, 0.5, 0.5, 0.0]).unwrap();
        assert_eq!(d.invert(1e-300), 1);
        assert_eq!(d.invert(0.5), 1);
        assert_eq!(d.invert(0.5000001), 2);
        assert_eq!(d.invert(1.0), 2);
    }
}
