use super::detector::{apply_detector, DetectorModel};
use crate::error::{Error, Result};
use crate::qcore::{born_probabilities, sample, Basis, OutcomeDistribution, RandomSource, StateVector};

/// Pure state given by column `index` of `basis`.
pub fn prepare_basis_state(basis: &Basis, index: usize) -> Result<StateVector> {
    basis.column(index)
}

/// Prepared state measured in a (generally conjugate) basis, with the Born
/// distribution computed once.
#[derive(Clone, Debug)]
pub struct SingleSampler {
    dist: OutcomeDistribution,
}

impl SingleSampler {
    pub fn new(prep: &StateVector, meas: &Basis) -> Result<Self> {
        Ok(Self {
            dist: born_probabilities(prep, meas)?,
        })
    }

    pub fn distribution(&self) -> &OutcomeDistribution {
        &self.dist
    }

    pub fn dim(&self) -> usize {
        self.dist.len()
    }

    #[inline]
    pub fn trial(&self, det: &DetectorModel, rng: &mut RandomSource) -> Option<usize> {
        let k = sample(&self.dist, rng);
        apply_detector(k, det, rng)
    }
}

/// One single-particle measurement; `None` is a no-click.
pub fn single_trial(
    prep: &StateVector,
    meas: &Basis,
    det: &DetectorModel,
    rng: &mut RandomSource,
) -> Result<Option<usize>> {
    if prep.dim() != meas.dim() {
        return Err(Error::DimensionMismatch {
            expected: meas.dim(),
            got: prep.dim(),
        });
    }
    det.validate_for(meas.dim())?;
    Ok(SingleSampler::new(prep, meas)?.trial(det, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::fourier_basis;

    #[test]
    fn prepare_examples() {
        let e1 = prepare_basis_state(&Basis::computational(3).unwrap(), 1).unwrap();
        assert_eq!(e1, StateVector::basis_vector(3, 1).unwrap());
        let f0 = prepare_basis_state(&fourier_basis(2).unwrap(), 0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(f0.amps().iter().all(|z| (z.re - s).abs() < 1e-15 && z.im == 0.0));
        let f2 = prepare_basis_state(&fourier_basis(3).unwrap(), 2).unwrap();
        assert!(f2.amps().iter().all(|z| (z.norm_sqr() - 1.0 / 3.0).abs() < 1e-12));
        assert!(prepare_basis_state(&fourier_basis(3).unwrap(), 3).is_err());
    }

    #[test]
    fn eigenstate_always_zero() {
        let e0 = StateVector::basis_vector(3, 0).unwrap();
        let comp = Basis::computational(3).unwrap();
        let mut rng = RandomSource::new(1);
        for _ in 0..1000 {
            assert_eq!(
                single_trial(&e0, &comp, &DetectorModel::IDEAL, &mut rng).unwrap(),
                Some(0)
            );
        }
    }

    #[test]
    fn saturated_detector_always_preferred() {
        let e0 = StateVector::basis_vector(3, 0).unwrap();
        let comp = Basis::computational(3).unwrap();
        let det = DetectorModel::new(1.0, 2, 0.0).unwrap();
        let mut rng = RandomSource::new(1);
        for _ in 0..1000 {
            assert_eq!(single_trial(&e0, &comp, &det, &mut rng).unwrap(), Some(2));
        }
    }

    #[test]
    fn dimension_mismatch() {
        let e0 = StateVector::basis_vector(2, 0).unwrap();
        let mut rng = RandomSource::new(1);
        let r = single_trial(&e0, &fourier_basis(3).unwrap(), &DetectorModel::IDEAL, &mut rng);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }
}
