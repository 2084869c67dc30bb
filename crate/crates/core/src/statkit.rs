//! Finite-sample statistical battery for symbol and bit streams.
//!
//! These are classical distributional tests (frequency, Pearson chi-square,
//! Wald-Wolfowitz runs, lagged serial correlation) plus two descriptive
//! measures (entropy rate, bias). They check distributional properties of a
//! finite stream only; passing them says nothing about algorithmic
//! randomness. All p-values are two-sided; normal approximations are used
//! for `N >= 100`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};
use crate::extract::{pack_bits, BitStream, SymbolStream};

pub const DEFAULT_SIGNIFICANCE: f64 = 0.001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Preconditions unmet (degenerate or too-short input); does not fail a suite.
    NotApplicable,
    /// Descriptive measure with no hypothesis test attached.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test_name: String,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub verdict: Verdict,
    pub pass: bool,
    pub params: BTreeMap<String, String>,
}

impl TestReport {
    fn tested(name: &str, statistic: f64, p_value: f64, significance: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        let verdict = if p_value >= significance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            test_name: name.to_string(),
            statistic: Some(statistic),
            p_value: Some(p_value),
            verdict,
            pass: verdict == Verdict::Pass,
            params: BTreeMap::new(),
        }
    }

    fn info(name: &str, statistic: f64) -> Self {
        Self {
            test_name: name.to_string(),
            statistic: Some(statistic),
            p_value: None,
            verdict: Verdict::Info,
            pass: true,
            params: BTreeMap::new(),
        }
    }

    fn not_applicable(name: &str, reason: impl Into<String>) -> Self {
        let mut r = Self {
            test_name: name.to_string(),
            statistic: None,
            p_value: None,
            verdict: Verdict::NotApplicable,
            pass: true,
            params: BTreeMap::new(),
        };
        r.params.insert("reason".into(), reason.into());
        r
    }

    fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

fn normal_two_sided(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

fn require(test: &'static str, need: usize, got: usize) -> Result<()> {
    if got < need {
        return Err(Error::TooShort { test, need, got });
    }
    Ok(())
}

/// Frequency test: `S = |#1 - #0| / sqrt N`, `p = erfc(S / sqrt 2)`.
pub fn monobit(bits: &BitStream, significance: f64) -> Result<TestReport> {
    require("monobit", 100, bits.len())?;
    let n = bits.len() as f64;
    let ones = bits.count_ones() as f64;
    let s = (2.0 * ones - n).abs() / n.sqrt();
    Ok(
        TestReport::tested("monobit", s, erfc(s / std::f64::consts::SQRT_2), significance)
            .with("n", bits.len())
            .with("ones", ones),
    )
}

/// Pearson chi-square against the uniform distribution, `n - 1` degrees of freedom.
pub fn chi_square_multinomial(stream: &SymbolStream, significance: f64) -> Result<TestReport> {
    let k = stream.alphabet() as usize;
    require("chi-square", 5 * k, stream.len())?;
    let expected = stream.len() as f64 / k as f64;
    let stat: f64 = stream
        .counts()
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dof = (k - 1) as f64;
    let p = if stat == 0.0 {
        1.0
    } else {
        gamma_ur(dof / 2.0, stat / 2.0)
    };
    Ok(TestReport::tested("chi-square", stat, p, significance)
        .with("n", stream.len())
        .with("categories", k)
        .with("dof", dof))
}

/// Wald-Wolfowitz runs test with `E[R] = 2 n0 n1 / N + 1 = 2 N pi (1 - pi) + 1`.
///
/// The frequency prerequisite `|pi - 1/2| < 2 / sqrt N` must hold; when it
/// does not the stream is already non-random and the report fails with
/// `p = 0`.
pub fn runs_test(bits: &BitStream, significance: f64) -> Result<TestReport> {
    require("runs", 100, bits.len())?;
    let n = bits.len() as f64;
    let n1 = bits.count_ones() as f64;
    let n0 = n - n1;
    let pi = n1 / n;
    let runs = 1 + bits.bits().windows(2).filter(|w| w[0] != w[1]).count();
    if (pi - 0.5).abs() >= 2.0 / n.sqrt() {
        let mut r = TestReport::tested("runs", runs as f64, 0.0, significance)
            .with("runs", runs)
            .with("proportion", pi);
        r.params
            .insert("prerequisite".into(), "frequency prerequisite not met".into());
        return Ok(r);
    }
    let mean = 2.0 * n0 * n1 / n + 1.0;
    let var = 2.0 * n0 * n1 * (2.0 * n0 * n1 - n) / (n * n * (n - 1.0));
    let z = (runs as f64 - mean) / var.sqrt();
    Ok(TestReport::tested("runs", z, normal_two_sided(z), significance)
        .with("runs", runs)
        .with("expected", mean)
        .with("proportion", pi))
}

/// Pearson correlation between `x[0..N-lag]` and `x[lag..N]`, with
/// `p = erfc(|rho| sqrt(N - lag) / sqrt 2)` under independence.
/// Degenerate (zero-variance) windows are not applicable.
pub fn serial_correlation(bits: &BitStream, lag: usize, significance: f64) -> Result<TestReport> {
    require("serial-correlation", lag + 2, bits.len())?;
    let name = "serial-correlation";
    let m = bits.len() - lag;
    let x = &bits.bits()[..m];
    let y = &bits.bits()[lag..];
    let mean = |v: &[u8]| v.iter().map(|&b| b as f64).sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a as f64 - mx, b as f64 - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(TestReport::not_applicable(name, "zero variance").with("lag", lag));
    }
    let rho = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let z = rho * (m as f64).sqrt();
    Ok(TestReport::tested(name, rho, normal_two_sided(z), significance).with("lag", lag))
}

/// Empirical Shannon entropy of the symbol histogram, in bits per symbol.
pub fn entropy_rate(stream: &SymbolStream) -> Result<f64> {
    require("entropy-rate", 1, stream.len())?;
    let n = stream.len() as f64;
    Ok(stream
        .counts()
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0))
}

/// Empirical `P(1) - 1/2`.
pub fn bias_estimate(bits: &BitStream) -> Result<f64> {
    require("bias", 1, bits.len())?;
    Ok(bits.count_ones() as f64 / bits.len() as f64 - 0.5)
}

/// Standard error of the bias estimate, `sqrt(p (1 - p) / N)`.
pub fn bias_std_err(bits: &BitStream) -> f64 {
    if bits.is_empty() {
        return f64::NAN;
    }
    let p = bits.count_ones() as f64 / bits.len() as f64;
    (p * (1.0 - p) / bits.len() as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "test", rename_all = "kebab-case")]
pub enum TestKind {
    Monobit,
    ChiSquare,
    Runs,
    SerialCorrelation { lag: usize },
    Entropy,
    Bias,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub significance: f64,
    pub tests: Vec<TestKind>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self::full(DEFAULT_SIGNIFICANCE)
    }
}

impl SuiteConfig {
    pub fn full(significance: f64) -> Self {
        Self {
            significance,
            tests: vec![
                TestKind::Monobit,
                TestKind::ChiSquare,
                TestKind::Runs,
                TestKind::SerialCorrelation { lag: 1 },
                TestKind::Entropy,
                TestKind::Bias,
            ],
        }
    }
}

/// Stream handed to [`run_suite`].
#[derive(Clone, Copy, Debug)]
pub enum Stream<'a> {
    Bits(&'a BitStream),
    Symbols(&'a SymbolStream),
}

impl Stream<'_> {
    pub fn len(&self) -> usize {
        match self {
            Stream::Bits(b) => b.len(),
            Stream::Symbols(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub reports: Vec<TestReport>,
    pub overall: bool,
    pub input_digest: String,
}

/// SHA-256 of the packed MSB-first payload for bits; of the alphabet size
/// and little-endian symbols otherwise.
pub fn stream_digest(stream: Stream<'_>) -> String {
    let mut h = Sha256::new();
    match stream {
        Stream::Bits(b) => h.update(pack_bits(b)),
        Stream::Symbols(s) => {
            h.update(s.alphabet().to_le_bytes());
            for sym in s.symbols() {
                h.update(sym.to_le_bytes());
            }
        }
    }
    format!("sha256:{}", hex::encode(h.finalize()))
}

fn kind_name(kind: TestKind) -> &'static str {
    match kind {
        TestKind::Monobit => "monobit",
        TestKind::ChiSquare => "chi-square",
        TestKind::Runs => "runs",
        TestKind::SerialCorrelation { .. } => "serial-correlation",
        TestKind::Entropy => "entropy-rate",
        TestKind::Bias => "bias",
    }
}

fn run_one(kind: TestKind, bits: Option<&BitStream>, symbols: &SymbolStream, sig: f64) -> TestReport {
    let name = kind_name(kind);
    let outcome = match (kind, bits) {
        (TestKind::ChiSquare, _) => chi_square_multinomial(symbols, sig),
        (TestKind::Entropy, _) => {
            entropy_rate(symbols).map(|h| TestReport::info(name, h).with("max", (symbols.alphabet() as f64).log2()))
        }
        (_, None) => Ok(TestReport::not_applicable(
            name,
            format!("binary test on alphabet of size {}", symbols.alphabet()),
        )),
        (TestKind::Monobit, Some(b)) => monobit(b, sig),
        (TestKind::Runs, Some(b)) => runs_test(b, sig),
        (TestKind::SerialCorrelation { lag }, Some(b)) => serial_correlation(b, lag, sig),
        (TestKind::Bias, Some(b)) => {
            bias_estimate(b).map(|e| TestReport::info(name, e).with("std_err", bias_std_err(b)))
        }
    };
    outcome.unwrap_or_else(|e| TestReport::not_applicable(name, e.to_string()))
}

/// Runs the selected tests in configured order.
pub fn run_suite(stream: Stream<'_>, config: &SuiteConfig) -> Result<SuiteResult> {
    if stream.is_empty() {
        return Err(Error::TooShort {
            test: "suite",
            need: 1,
            got: 0,
        });
    }
    let (bits, symbols): (Option<BitStream>, SymbolStream) = match stream {
        Stream::Bits(b) => (None, SymbolStream::from(b)),
        Stream::Symbols(s) if s.alphabet() == 2 => (Some(BitStream::try_from(s)?), s.clone()),
        Stream::Symbols(s) => (None, s.clone()),
    };
    let bit_view = match stream {
        Stream::Bits(b) => Some(b),
        _ => bits.as_ref(),
    };
    let reports: Vec<TestReport> = config
        .tests
        .par_iter()
        .map(|&k| run_one(k, bit_view, &symbols, config.significance))
        .collect();
    let overall = reports.iter().all(|r| !r.failed());
    Ok(SuiteResult {
        reports,
        overall,
        input_digest: stream_digest(stream),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alternating(n: usize) -> BitStream {
        BitStream::new((0..n).map(|i| (i % 2) as u8).collect()).unwrap()
    }

    #[test]
    fn monobit_balanced_and_extreme() {
        let r = monobit(&alternating(100), 0.001).unwrap();
        assert_eq!(r.statistic, Some(0.0));
        assert_eq!(r.p_value, Some(1.0));
        assert!(r.pass);
        let z = monobit(&BitStream::new(vec![0; 100]).unwrap(), 0.001).unwrap();
        assert!(z.p_value.unwrap() < 1e-15);
        assert!(!z.pass);
    }

    #[test]
    fn monobit_too_short() {
        assert!(matches!(
            monobit(&alternating(99), 0.001),
            Err(Error::TooShort { need: 100, .. })
        ));
    }

    #[test]
    fn chi_square_uniform_and_degenerate() {
        let s = SymbolStream::new(3, (0..300).map(|i| i % 3).collect()).unwrap();
        let r = chi_square_multinomial(&s, 0.001).unwrap();
        assert_eq!(r.statistic, Some(0.0));
        assert_eq!(r.p_value, Some(1.0));
        // O = (300, 0, 0), E = 100: (200^2 + 100^2 + 100^2) / 100 = 600
        let c = SymbolStream::new(3, vec![0; 300]).unwrap();
        let r = chi_square_multinomial(&c, 0.001).unwrap();
        assert!((r.statistic.unwrap() - 600.0).abs() < 1e-9);
        assert!(!r.pass);
        assert!(chi_square_multinomial(&SymbolStream::new(3, vec![0; 14]).unwrap(), 0.001).is_err());
    }

    #[test]
    fn chi_square_p_value_matches_closed_form() {
        // dof = 2: survival function is exp(-x / 2)
        let mut sym = vec![0u32; 40];
        sym.extend(vec![1u32; 30]);
        sym.extend(vec![2u32; 20]);
        let r = chi_square_multinomial(&SymbolStream::new(3, sym).unwrap(), 0.001).unwrap();
        let x = r.statistic.unwrap();
        assert!((x - 20.0 / 3.0).abs() < 1e-12);
        assert!((r.p_value.unwrap() - (-x / 2.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn runs_extremes_fail() {
        let r = runs_test(&alternating(1000), 0.001).unwrap();
        assert_eq!(r.params["runs"], "1000");
        assert!(!r.pass);
        let mut v = vec![0u8; 500];
        v.extend(vec![1u8; 500]);
        let r = runs_test(&BitStream::new(v).unwrap(), 0.001).unwrap();
        assert_eq!(r.params["runs"], "2");
        assert!(!r.pass);
    }

    #[test]
    fn runs_prerequisite_failure_is_a_fail() {
        let r = runs_test(&BitStream::new(vec![0; 200]).unwrap(), 0.001).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.params.contains_key("prerequisite"));
    }

    #[test]
    fn serial_alternating_is_minus_one() {
        let r = serial_correlation(&alternating(1000), 1, 0.001).unwrap();
        assert!((r.statistic.unwrap() + 1.0).abs() < 1e-9);
        assert!(!r.pass);
    }

    #[test]
    fn serial_constant_not_applicable() {
        let r = serial_correlation(&BitStream::new(vec![1; 100]).unwrap(), 1, 0.001).unwrap();
        assert_eq!(r.verdict, Verdict::NotApplicable);
        assert!(serial_correlation(&alternating(3), 2, 0.001).is_err());
    }

    #[test]
    fn entropy_examples() {
        let bits = SymbolStream::new(2, vec![0, 1, 1, 0]).unwrap();
        assert!((entropy_rate(&bits).unwrap() - 1.0).abs() < 1e-15);
        let constant = SymbolStream::new(5, vec![3; 10]).unwrap();
        assert_eq!(entropy_rate(&constant).unwrap(), 0.0);
        let quad = SymbolStream::new(4, (0..400).map(|i| i % 4).collect()).unwrap();
        assert!((entropy_rate(&quad).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bias_examples() {
        assert_eq!(bias_estimate(&BitStream::new(vec![1; 10]).unwrap()).unwrap(), 0.5);
        assert_eq!(bias_estimate(&alternating(10)).unwrap(), 0.0);
        assert!(bias_estimate(&BitStream::default()).is_err());
    }

    #[test]
    fn suite_all_zeros_fails_monobit_and_runs() {
        let z = BitStream::new(vec![0; 1000]).unwrap();
        let res = run_suite(Stream::Bits(&z), &SuiteConfig::default()).unwrap();
        assert!(!res.overall);
        let failed: Vec<&str> = res
            .reports
            .iter()
            .filter(|r| r.failed())
            .map(|r| r.test_name.as_str())
            .collect();
        assert!(failed.contains(&"monobit") && failed.contains(&"runs"));
    }

    #[test]
    fn suite_empty_selection_passes() {
        let b = alternating(10);
        let cfg = SuiteConfig {
            significance: 0.001,
            tests: vec![],
        };
        let res = run_suite(Stream::Bits(&b), &cfg).unwrap();
        assert!(res.reports.is_empty());
        assert!(res.overall);
    }

    #[test]
    fn suite_on_ternary_marks_binary_tests_not_applicable() {
        let s = SymbolStream::new(3, (0..3000).map(|i| (i * 7 % 11) % 3).collect()).unwrap();
        let res = run_suite(Stream::Symbols(&s), &SuiteConfig::default()).unwrap();
        let mono = res.reports.iter().find(|r| r.test_name == "monobit").unwrap();
        assert_eq!(mono.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn suite_rejects_empty_stream() {
        assert!(run_suite(Stream::Bits(&BitStream::default()), &SuiteConfig::default()).is_err());
    }

    #[test]
    fn digest_is_deterministic_and_content_sensitive() {
        let a = alternating(64);
        let b = BitStream::new(vec![0; 64]).unwrap();
        assert_eq!(stream_digest(Stream::Bits(&a)), stream_digest(Stream::Bits(&a.clone())));
        assert_ne!(stream_digest(Stream::Bits(&a)), stream_digest(Stream::Bits(&b)));
    }
}
