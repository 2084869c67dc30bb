//! Reduced-size invariant checks run by `selftest`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::extract::SymbolStream;
use crate::extract::{pack_bits, unpack_bits, BitStream};
use crate::protocols::{
    correlation_estimate, rotated_state_residual, singlet_state, BasisId, DetectorModel, EprSampler, ProtocolConfig,
    Setup, SpinLabel,
};
use crate::qcore::{born_probabilities, fourier_basis, sample, JointState, RandomSource, StateVector};
use crate::statkit::{chi_square_multinomial, Verdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Samples `n` pairs from `state` with both sides at each angle and counts
/// pairs violating `m_b = -m_a` (index `b = d - 1 - a`). For the singlet the
/// count is exactly zero.
pub fn check_uniqueness(
    spin: SpinLabel,
    state: &JointState,
    angles_deg: &[f64],
    n: u64,
    rng: &mut RandomSource,
) -> Result<CheckResult> {
    let last = spin.dim() - 1;
    let mut bad = 0u64;
    for &deg in angles_deg {
        let t = deg.to_radians();
        let sampler = EprSampler::with_state(spin, state, t, t)?;
        bad += (0..n)
            .filter(|_| {
                let (a, b) = sampler.sample_pair(rng);
                a + b != last
            })
            .count() as u64;
    }
    Ok(CheckResult::new(
        format!("uniqueness spin {spin}"),
        bad == 0,
        format!(
            "{bad} non-antipodal pairs in {} trials at {angles_deg:?} deg",
            n * angles_deg.len() as u64
        ),
    ))
}

fn rotation_invariance() -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for spin in SpinLabel::ALL {
        let psi = singlet_state(spin);
        for k in 0..12 {
            let theta = k as f64 * std::f64::consts::FRAC_PI_6 + 0.1;
            worst = worst.max(rotated_state_residual(spin, &psi, theta)?);
        }
    }
    Ok(CheckResult::new(
        "singlet rotation invariance",
        worst < 1e-9,
        format!("max residual {worst:.3e}"),
    ))
}

fn correlation_law(rng: &mut RandomSource, n: u64) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for deg in [0.0, 45.0, 90.0, 135.0, 180.0] {
        let t: f64 = f64::to_radians(deg);
        let e = correlation_estimate(t, n, rng)?;
        worst = worst.max((e + t.cos()).abs());
    }
    // five sigma at the worst case variance 1/n
    let tol = 5.0 / (n as f64).sqrt();
    Ok(CheckResult::new(
        "spin-1/2 correlation -cos",
        worst <= tol,
        format!("max deviation {worst:.4} (tolerance {tol:.4})"),
    ))
}

fn born_sampling(rng: &mut RandomSource, n: u64) -> Result<CheckResult> {
    let d = 3;
    let dist = born_probabilities(&StateVector::basis_vector(d, 0)?, &fourier_basis(d)?)?;
    let symbols: Vec<u32> = (0..n).map(|_| sample(&dist, rng) as u32).collect();
    let report = chi_square_multinomial(&SymbolStream::new(d as u32, symbols)?, 1e-4)?;
    Ok(CheckResult::new(
        "born sampling d=3",
        report.verdict == Verdict::Pass,
        format!("chi-square p = {:.4}", report.p_value.unwrap_or(f64::NAN)),
    ))
}

fn pack_roundtrip(rng: &mut RandomSource) -> Result<CheckResult> {
    let mut ok = true;
    for len in [0usize, 1, 7, 8, 9, 1000, 1023] {
        let bits = BitStream::from_bools((0..len).map(|_| rng.bernoulli(0.5)));
        let back = unpack_bits(&pack_bits(&bits), len as u64)?;
        ok &= back == bits;
    }
    Ok(CheckResult::new("pack/unpack round trip", ok, "lengths 0..1023"))
}

fn worker_determinism() -> Result<CheckResult> {
    let cfg = ProtocolConfig {
        setup: Setup::EprXor {
            spin: SpinLabel::One,
            theta_a: 0.0,
            theta_b: 0.7,
            det_a: DetectorModel::new(0.1, 1, 0.05)?,
            det_b: DetectorModel::IDEAL,
        },
        events: 20_000,
        seed: 7,
        block_size: 1000,
    };
    let one = cfg.run(1)?;
    let many = cfg.run(4)?;
    let single = ProtocolConfig {
        setup: Setup::SingleConjugate {
            dim: 4,
            prep_basis: BasisId::Computational,
            prep_index: 1,
            meas_basis: BasisId::Fourier,
            detector: DetectorModel::IDEAL,
        },
        ..cfg
    };
    let same = one == many && single.run(1)? == single.run(3)?;
    Ok(CheckResult::new("worker-count determinism", same, "1 vs 3-4 workers"))
}

/// Runs every check; `scale` multiplies the sample sizes.
pub fn run_selftest(seed: u64, scale: u64) -> Result<Vec<CheckResult>> {
    let scale = scale.max(1);
    let master = RandomSource::new(seed);
    let mut out = vec![rotation_invariance()?];
    for (i, spin) in SpinLabel::ALL.into_iter().enumerate() {
        out.push(check_uniqueness(
            spin,
            &singlet_state(spin),
            &[0.0, 30.0],
            20_000 * scale,
            &mut master.fork(i as u64),
        )?);
    }
    out.push(correlation_law(&mut master.fork(10), 20_000 * scale)?);
    out.push(born_sampling(&mut master.fork(11), 30_000 * scale)?);
    out.push(pack_roundtrip(&mut master.fork(12))?);
    out.push(worker_determinism()?);
    Ok(out)
}
