//! XOR of the two halves of singlet pairs. Detectors that stick to outcome 1
//! bias each side; the XOR stream keeps only a second-order residue.

use beamsplit::cli::commands::{cmd_sweep, predicted_xor_bias, sweep_csv, SweepConfig};

fn main() -> beamsplit::Result<()> {
    let cfg = SweepConfig {
        angles_deg: vec![0.0, 45.0, 90.0, 135.0, 180.0],
        biases: vec![0.0, 0.05, 0.2],
        no_click_prob: 0.0,
        events: 400_000,
        seed: 19,
        block_size: 65_536,
        workers: 4,
    };
    print!("{}", sweep_csv(&cmd_sweep(&cfg)?));
    println!(
        "closed form at 90 deg, epsilon 0.05: {:+.4}",
        predicted_xor_bias(std::f64::consts::FRAC_PI_2, 0.05)
    );
    Ok(())
}
