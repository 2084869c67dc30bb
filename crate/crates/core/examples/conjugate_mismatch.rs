//! Preparation and measurement bases that are "apart": the overlap table
//! of the computational and Fourier bases is flat at 1/d, while identical
//! bases give a deterministic (useless) source.

use beamsplit::qcore::{fourier_basis, overlap_table, spin_rotation_basis, Basis, SpinLabel};

fn main() -> beamsplit::Result<()> {
    let d = 3;
    let table = overlap_table(&Basis::computational(d)?, &fourier_basis(d)?)?;
    println!("computational vs Fourier, d={d}:{table:.4}");
    let same = overlap_table(&fourier_basis(d)?, &fourier_basis(d)?)?;
    println!("Fourier vs itself:{same:.4}");

    // spin-1 rotations interpolate between the two extremes
    for deg in [0.0f64, 30.0, 60.0, 90.0] {
        let t = overlap_table(
            &spin_rotation_basis(SpinLabel::One, 0.0)?,
            &spin_rotation_basis(SpinLabel::One, deg.to_radians())?,
        )?;
        let max = t.iter().copied().fold(0.0, f64::max);
        println!("spin-1 rotated by {deg:>4} deg: largest overlap {max:.4}");
    }
    Ok(())
}
