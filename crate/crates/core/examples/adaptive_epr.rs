//! Delayed-choice measurement: Bob's angle depends on Alice's reported outcome.

use beamsplit::protocols::{AdaptationMap, AdaptiveSampler, DetectorModel, SpinLabel};
use beamsplit::qcore::RandomSource;

fn main() -> beamsplit::Result<()> {
    let pi = std::f64::consts::PI;
    let maps = [
        ("constant 90 deg", vec![pi / 2.0, pi / 2.0]),
        ("0 -> 0, 1 -> 180 deg", vec![0.0, pi]),
    ];
    for (name, angles) in maps {
        let sampler = AdaptiveSampler::new(SpinLabel::Half, 0.0, AdaptationMap::new(angles)?)?;
        let mut rng = RandomSource::new(23);
        let mut table = [[0u32; 2]; 2];
        for i in 0..100_000 {
            let r = sampler.trial(i, &DetectorModel::IDEAL, &DetectorModel::IDEAL, &mut rng);
            if let Some((a, b)) = r.pair() {
                table[a][b] += 1;
            }
        }
        println!("{name}: joint counts [a][b] = {table:?}");
    }
    Ok(())
}
