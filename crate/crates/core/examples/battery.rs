//! The statistical battery on a fair stream and on two defective ones.

use beamsplit::extract::BitStream;
use beamsplit::qcore::RandomSource;
use beamsplit::statkit::{run_suite, Stream, SuiteConfig};

fn main() -> beamsplit::Result<()> {
    let mut rng = RandomSource::new(41);
    let n = 100_000;
    let streams = [
        ("fair", BitStream::from_bools((0..n).map(|_| rng.bernoulli(0.5)))),
        (
            "biased 0.52",
            BitStream::from_bools((0..n).map(|_| rng.bernoulli(0.52))),
        ),
        ("alternating", BitStream::from_bools((0..n).map(|i| i % 2 == 1))),
    ];
    for (name, bits) in &streams {
        let suite = run_suite(Stream::Bits(bits), &SuiteConfig::default())?;
        println!("{name}: overall {} ({})", suite.overall, suite.input_digest);
        for r in &suite.reports {
            println!(
                "  {:<20} {:?} statistic {:?} p {:?}",
                r.test_name, r.verdict, r.statistic, r.p_value
            );
        }
    }
    Ok(())
}
