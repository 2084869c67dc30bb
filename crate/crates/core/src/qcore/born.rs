use nalgebra::DMatrix;

use super::basis::Basis;
use super::rng::RandomSource;
use super::state::{JointState, OutcomeDistribution, StateVector};
use crate::error::{Error, Result};

/// Born rule: `p_k = |<column_k | state>|^2`.
pub fn born_probabilities(state: &StateVector, basis: &Basis) -> Result<OutcomeDistribution> {
    if state.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            got: state.dim(),
        });
    }
    let raw = (0..basis.dim())
        .map(|k| basis.project(k, state.amps()).norm_sqr())
        .collect();
    OutcomeDistribution::from_born(raw)
}

/// Joint outcome probabilities for local measurements on both halves of a
/// bipartite state, indexed `a * dim_b + b`.
pub fn joint_born_probabilities(joint: &JointState, basis_a: &Basis, basis_b: &Basis) -> Result<OutcomeDistribution> {
    for (want, got) in [(joint.dim_a(), basis_a.dim()), (joint.dim_b(), basis_b.dim())] {
        if want != got {
            return Err(Error::DimensionMismatch { expected: want, got });
        }
    }
    // amplitude(a, b) = (A^dagger Psi conj(B))[a, b] with Psi[i, k] = psi[i * dim_b + k]
    let psi = DMatrix::from_row_slice(joint.dim_a(), joint.dim_b(), joint.amps());
    let amps = basis_a.matrix().adjoint() * psi * basis_b.matrix().map(|z| z.conj());
    let mut raw = Vec::with_capacity(joint.dim_a() * joint.dim_b());
    for a in 0..joint.dim_a() {
        for b in 0..joint.dim_b() {
            raw.push(amps[(a, b)].norm_sqr());
        }
    }
    OutcomeDistribution::from_born(raw)
}

/// Draws an outcome index by inverse CDF over the stored order.
///
/// The uniform variate lies in `(0, 1]`, so outcomes whose probability is
/// below the 2^-53 resolution (numerical dust such as ~1e-33 leakage off a
/// singlet's anti-diagonal) are never produced.
#[inline]
pub fn sample(dist: &OutcomeDistribution, rng: &mut RandomSource) -> usize {
    dist.invert(rng.uniform_open_closed())
}
