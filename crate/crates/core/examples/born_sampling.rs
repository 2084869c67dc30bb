//! Multi-outcome source: a d-level system prepared in the Fourier basis and
//! measured computationally yields uniform symbols over d outcomes.

use beamsplit::extract::SymbolStream;
use beamsplit::qcore::{born_probabilities, fourier_basis, sample, Basis, RandomSource};
use beamsplit::statkit::{chi_square_multinomial, entropy_rate};

fn main() -> beamsplit::Result<()> {
    let mut rng = RandomSource::new(7);
    for d in [3, 4, 6] {
        let prep = fourier_basis(d)?.column(0)?;
        let dist = born_probabilities(&prep, &Basis::computational(d)?)?;
        let symbols: Vec<u32> = (0..100_000).map(|_| sample(&dist, &mut rng) as u32).collect();
        let stream = SymbolStream::new(d as u32, symbols)?;
        let chi = chi_square_multinomial(&stream, 0.001)?;
        println!(
            "d={d}: probs {:?}, counts {:?}, chi-square p {:.3}, entropy {:.4} of {:.4} bits",
            dist.probs().iter().map(|p| format!("{p:.3}")).collect::<Vec<_>>(),
            stream.counts(),
            chi.p_value.unwrap(),
            entropy_rate(&stream)?,
            (d as f64).log2()
        );
    }
    Ok(())
}
