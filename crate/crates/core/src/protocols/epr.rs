//! Singlet-pair trials: both halves of a total-spin-zero state measured
//! along (possibly different) directions in the x-z plane.

use nalgebra::DMatrix;

use super::detector::{apply_detector, DetectorModel};
use crate::error::{Error, Result};
use crate::qcore::{
    joint_born_probabilities, sample, spin_rotation_basis, JointState, OutcomeDistribution, RandomSource, SpinLabel,
    C64,
};

/// The spin-j singlet with amplitudes in the `m = +j, ..., -j` ordering:
///
/// * j = 1/2: `(|1/2,-1/2> - |-1/2,1/2>) / sqrt 2`
/// * j = 1: `(-|0,0> + |-1,1> + |1,-1>) / sqrt 3`
/// * j = 3/2: `(|3/2,-3/2> - |-3/2,3/2> - |1/2,-1/2> + |-1/2,1/2>) / 2`
pub fn singlet_state(spin: SpinLabel) -> JointState {
    let d = spin.dim();
    // (index of m_a, index of m_b, amplitude)
    let terms: Vec<(usize, usize, f64)> = match spin {
        SpinLabel::Half => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            vec![(0, 1, s), (1, 0, -s)]
        }
        SpinLabel::One => {
            let s = 1.0 / 3f64.sqrt();
            vec![(1, 1, -s), (2, 0, s), (0, 2, s)]
        }
        SpinLabel::ThreeHalves => vec![(0, 3, 0.5), (3, 0, -0.5), (1, 2, -0.5), (2, 1, 0.5)],
    };
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for (a, b, v) in terms {
        amps[a * d + b] = C64::new(v, 0.0);
    }
    JointState::new(d, d, amps).expect("singlet amplitudes are normalized")
}

/// `|| (U(theta) x U(theta)) psi - psi ||`; vanishes for rotation-invariant states.
pub fn rotated_state_residual(spin: SpinLabel, joint: &JointState, theta: f64) -> Result<f64> {
    let d = spin.dim();
    if joint.dim_a() != d || joint.dim_b() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: joint.dim_a(),
        });
    }
    let u = spin_rotation_basis(spin, theta)?;
    let psi = DMatrix::from_row_slice(d, d, joint.amps());
    let rotated = u.matrix() * &psi * u.matrix().transpose();
    Ok((rotated - psi).norm())
}

/// One pair measurement. `a`/`b` are outcome indices (`m = j - index`) or
/// `None` for a no-click; a record with either side missing is discarded
/// under coincidence gating.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub a: Option<usize>,
    pub b: Option<usize>,
    pub theta_a: f64,
    pub theta_b: f64,
}

impl TrialRecord {
    pub fn is_coincidence(&self) -> bool {
        self.a.is_some() && self.b.is_some()
    }

    pub fn pair(&self) -> Option<(usize, usize)> {
        Some((self.a?, self.b?))
    }
}

/// Fixed-angle pair measurement with the joint distribution precomputed.
#[derive(Clone, Debug)]
pub struct EprSampler {
    dim_b: usize,
    theta_a: f64,
    theta_b: f64,
    joint: OutcomeDistribution,
}

impl EprSampler {
    pub fn new(spin: SpinLabel, theta_a: f64, theta_b: f64) -> Result<Self> {
        Self::with_state(spin, &singlet_state(spin), theta_a, theta_b)
    }

    /// Same measurement applied to an arbitrary two-particle state of matching dimension.
    pub fn with_state(spin: SpinLabel, state: &JointState, theta_a: f64, theta_b: f64) -> Result<Self> {
        let basis_a = spin_rotation_basis(spin, theta_a)?;
        let basis_b = spin_rotation_basis(spin, theta_b)?;
        Ok(Self {
            dim_b: state.dim_b(),
            theta_a,
            theta_b,
            joint: joint_born_probabilities(state, &basis_a, &basis_b)?,
        })
    }

    pub fn joint(&self) -> &OutcomeDistribution {
        &self.joint
    }

    /// Ideal-detector outcome pair.
    #[inline]
    pub fn sample_pair(&self, rng: &mut RandomSource) -> (usize, usize) {
        let k = sample(&self.joint, rng);
        (k / self.dim_b, k % self.dim_b)
    }

    #[inline]
    pub fn trial(
        &self,
        trial_index: u64,
        det_a: &DetectorModel,
        det_b: &DetectorModel,
        rng: &mut RandomSource,
    ) -> TrialRecord {
        let (a, b) = self.sample_pair(rng);
        TrialRecord {
            trial_index,
            a: apply_detector(a, det_a, rng),
            b: apply_detector(b, det_b, rng),
            theta_a: self.theta_a,
            theta_b: self.theta_b,
        }
    }
}

/// One singlet pair measured at fixed angles.
pub fn epr_trial(
    spin: SpinLabel,
    theta_a: f64,
    theta_b: f64,
    det_a: &DetectorModel,
    det_b: &DetectorModel,
    rng: &mut RandomSource,
) -> Result<TrialRecord> {
    det_a.validate_for(spin.dim())?;
    det_b.validate_for(spin.dim())?;
    Ok(EprSampler::new(spin, theta_a, theta_b)?.trial(0, det_a, det_b, rng))
}

/// Bob's measurement angle (radians) as a function of Alice's reported outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptationMap {
    angles: Vec<f64>,
}

impl AdaptationMap {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("adaptation angle"));
        }
        Ok(Self { angles })
    }

    /// Every outcome mapped to the same angle.
    pub fn constant(dim: usize, theta: f64) -> Result<Self> {
        Self::new(vec![theta; dim])
    }

    pub fn check_total(&self, dim: usize) -> Result<()> {
        if self.angles.len() != dim {
            return Err(Error::IncompleteAdaptation { dim });
        }
        Ok(())
    }

    pub fn angle(&self, alice: usize) -> f64 {
        self.angles[alice]
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

/// Delayed-choice pair measurement: Alice measures first, her reported
/// outcome selects Bob's angle, and Bob samples from the exact conditional
/// distribution of the collapsed state.
#[derive(Clone, Debug)]
pub struct AdaptiveSampler {
    theta_a: f64,
    adapt: AdaptationMap,
    alice: OutcomeDistribution,
    // conditional[a_true][a_reported]: Bob's distribution at angle adapt(a_reported)
    conditional: Vec<Vec<OutcomeDistribution>>,
}

impl AdaptiveSampler {
    pub fn new(spin: SpinLabel, theta_a: f64, adapt: AdaptationMap) -> Result<Self> {
        let d = spin.dim();
        adapt.check_total(d)?;
        let state = singlet_state(spin);
        let basis_a = spin_rotation_basis(spin, theta_a)?;
        let joints = adapt
            .angles()
            .iter()
            .map(|&t| joint_born_probabilities(&state, &basis_a, &spin_rotation_basis(spin, t)?))
            .collect::<Result<Vec<_>>>()?;
        let marginal: Vec<f64> = (0..d)
            .map(|a| joints[0].probs()[a * d..(a + 1) * d].iter().sum())
            .collect();
        let alice = OutcomeDistribution::from_born(marginal.clone())?;
        let mut conditional = Vec::with_capacity(d);
        for (a_true, &pa) in marginal.iter().enumerate() {
            let row: Vec<Result<OutcomeDistribution>> = joints
                .iter()
                .map(|joint| {
                    if pa <= 0.0 {
                        // unreachable branch; any valid distribution will do
                        let mut point = vec![0.0; d];
                        point[0] = 1.0;
                        return OutcomeDistribution::new(point);
                    }
                    let slice = &joint.probs()[a_true * d..(a_true + 1) * d];
                    let total: f64 = slice.iter().sum();
                    OutcomeDistribution::from_born(slice.iter().map(|p| p / total).collect())
                })
                .collect();
            conditional.push(row.into_iter().collect::<Result<Vec<_>>>()?);
        }
        Ok(Self {
            theta_a,
            adapt,
            alice,
            conditional,
        })
    }

    pub fn alice_marginal(&self) -> &OutcomeDistribution {
        &self.alice
    }

    /// Bob's conditional distribution given Alice's true and reported outcomes.
    pub fn bob_conditional(&self, a_true: usize, a_reported: usize) -> &OutcomeDistribution {
        &self.conditional[a_true][a_reported]
    }

    #[inline]
    pub fn trial(
        &self,
        trial_index: u64,
        det_a: &DetectorModel,
        det_b: &DetectorModel,
        rng: &mut RandomSource,
    ) -> TrialRecord {
        let a_true = sample(&self.alice, rng);
        let Some(a_rep) = apply_detector(a_true, det_a, rng) else {
            // nothing to forward; Bob keeps Alice's setting and the trial is discarded
            return TrialRecord {
                trial_index,
                a: None,
                b: None,
                theta_a: self.theta_a,
                theta_b: self.theta_a,
            };
        };
        let b_true = sample(&self.conditional[a_true][a_rep], rng);
        TrialRecord {
            trial_index,
            a: Some(a_rep),
            b: apply_detector(b_true, det_b, rng),
            theta_a: self.theta_a,
            theta_b: self.adapt.angle(a_rep),
        }
    }
}

/// One delayed-choice singlet pair.
pub fn adaptive_epr_trial(
    spin: SpinLabel,
    theta_a: f64,
    adapt: &AdaptationMap,
    det_a: &DetectorModel,
    det_b: &DetectorModel,
    rng: &mut RandomSource,
) -> Result<TrialRecord> {
    det_a.validate_for(spin.dim())?;
    det_b.validate_for(spin.dim())?;
    Ok(AdaptiveSampler::new(spin, theta_a, adapt.clone())?.trial(0, det_a, det_b, rng))
}
