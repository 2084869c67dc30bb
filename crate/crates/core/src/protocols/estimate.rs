use serde::Serialize;

use super::epr::EprSampler;
use crate::error::{Error, Result};
use crate::qcore::{RandomSource, SpinLabel};

/// Local hidden-variable bound on `|S|`.
pub const CLASSICAL_CHSH_BOUND: f64 = 2.0;
/// Tsirelson bound `2 sqrt 2`.
pub const QUANTUM_CHSH_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub theta_a: f64,
    pub theta_b: f64,
    pub value: f64,
    pub std_err: f64,
    pub trials: u64,
}

/// Spin-1/2 singlet correlation `<s_a s_b>` with outcome 0 -> +1, 1 -> -1,
/// ideal detectors.
pub fn correlation_at(theta_a: f64, theta_b: f64, n: u64, rng: &mut RandomSource) -> Result<CorrelationEstimate> {
    if n == 0 {
        return Err(Error::config("events", "need at least one trial"));
    }
    let sampler = EprSampler::new(SpinLabel::Half, theta_a, theta_b)?;
    let mut agree: u64 = 0;
    for _ in 0..n {
        let (a, b) = sampler.sample_pair(rng);
        agree += (a == b) as u64;
    }
    let value = (2.0 * agree as f64 - n as f64) / n as f64;
    // each product is +-1, so its variance is 1 - E^2
    let std_err = ((1.0 - value * value).max(0.0) / n as f64).sqrt();
    Ok(CorrelationEstimate {
        theta_a,
        theta_b,
        value,
        std_err,
        trials: n,
    })
}

/// Correlation with Alice at 0 and Bob at `delta_theta`.
pub fn correlation_estimate(delta_theta: f64, n: u64, rng: &mut RandomSource) -> Result<f64> {
    Ok(correlation_at(0.0, delta_theta, n, rng)?.value)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChshEstimate {
    /// `E(a,b) - E(a,b') + E(a',b) + E(a',b')`.
    pub s: f64,
    pub std_err: f64,
    /// In the order `(a,b), (a,b'), (a',b), (a',b')`.
    pub terms: [CorrelationEstimate; 4],
}

impl ChshEstimate {
    /// `|S|` exceeds the classical bound by more than `sigmas` standard errors.
    pub fn violates_classical_bound(&self, sigmas: f64) -> bool {
        self.s.abs() - sigmas * self.std_err > CLASSICAL_CHSH_BOUND
    }
}

/// CHSH combination from four independent correlation estimates.
pub fn chsh_estimate(
    angles_a: (f64, f64),
    angles_b: (f64, f64),
    n: u64,
    rng: &mut RandomSource,
) -> Result<ChshEstimate> {
    let (a, a2) = angles_a;
    let (b, b2) = angles_b;
    let terms = [
        correlation_at(a, b, n, rng)?,
        correlation_at(a, b2, n, rng)?,
        correlation_at(a2, b, n, rng)?,
        correlation_at(a2, b2, n, rng)?,
    ];
    let s = terms[0].value - terms[1].value + terms[2].value + terms[3].value;
    let std_err = terms.iter().map(|t| t.std_err.powi(2)).sum::<f64>().sqrt();
    Ok(ChshEstimate { s, std_err, terms })
}
