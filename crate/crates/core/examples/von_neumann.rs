//! Classical baseline: von Neumann pairing on an i.i.d. biased stream.

use beamsplit::extract::{von_neumann_debias, BitStream};
use beamsplit::qcore::RandomSource;
use beamsplit::statkit::{bias_estimate, monobit};

fn main() -> beamsplit::Result<()> {
    let mut rng = RandomSource::new(37);
    for p in [0.5, 0.7, 0.9] {
        let n = 1_000_000;
        let input = BitStream::from_bools((0..n).map(|_| rng.bernoulli(p)));
        let out = von_neumann_debias(&input);
        println!(
            "P(1)={p}: input bias {:+.4}, output {} bits (yield {:.4}, expected {:.4}), output bias {:+.4}, monobit p {:.3}",
            bias_estimate(&input)?,
            out.len(),
            out.len() as f64 / n as f64,
            p * (1.0 - p),
            bias_estimate(&out)?,
            monobit(&out, 0.001)?.p_value.unwrap()
        );
    }
    Ok(())
}
