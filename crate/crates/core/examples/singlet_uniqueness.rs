//! Singlet pairs measured along the same axis: Bob's outcome is fixed by
//! Alice's (m_B = -m_A) for every spin and every common angle.

use beamsplit::protocols::{rotated_state_residual, singlet_state, EprSampler, SpinLabel};
use beamsplit::qcore::RandomSource;

fn main() -> beamsplit::Result<()> {
    let mut rng = RandomSource::new(11);
    for spin in SpinLabel::ALL {
        let psi = singlet_state(spin);
        let d = spin.dim();
        for deg in [0.0f64, 30.0, 77.0] {
            let t = deg.to_radians();
            let sampler = EprSampler::new(spin, t, t)?;
            let mut table = vec![vec![0u32; d]; d];
            for _ in 0..20_000 {
                let (a, b) = sampler.sample_pair(&mut rng);
                table[a][b] += 1;
            }
            println!(
                "spin {spin} at {deg:>4} deg: counts {table:?}, rotation residual {:.1e}",
                rotated_state_residual(spin, &psi, t)?
            );
        }
    }
    Ok(())
}
