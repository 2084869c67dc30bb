//! Finite-dimensional Hilbert-space machinery: pure states, measurement
//! bases, Born-rule probabilities and the seeded entropy source used to
//! sample them.

mod basis;
mod born;
mod rng;
mod state;

pub use basis::{angular_momentum_y, fourier_basis, overlap_table, spin_rotation_basis, Basis, SpinLabel, UNITARY_TOL};
pub use born::{born_probabilities, joint_born_probabilities, sample};
pub use rng::RandomSource;
pub use state::{JointState, OutcomeDistribution, StateVector, C64, NORM_TOL, PROB_SUM_TOL};
