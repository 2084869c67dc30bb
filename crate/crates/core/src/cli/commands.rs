use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Extraction, PayloadFormat, RunConfig};
use super::report::{
    report_path, sidecar_path, OutputFiles, Quantity, ReportDocument, Sidecar, LOCALITY_NOTE, TOOL_VERSION,
};
use crate::error::{Error, Result};
use crate::extract::{
    eliminate, identify, pack_bits, unpack_bits, xor_combine, BitStream, Equipartition, SymbolStream,
};
use crate::protocols::{
    chsh_estimate, run_blocks, BasisId, DetectorModel, EprSampler, ProtocolConfig, ProtocolOutput, Setup, SpinLabel,
    TrialRecord, CLASSICAL_CHSH_BOUND, QUANTUM_CHSH_BOUND,
};
use crate::qcore::{overlap_table, RandomSource};
use crate::statkit::{bias_estimate, bias_std_err, run_suite, stream_digest, Stream, SuiteConfig};

/// Output of an in-memory generation run.
#[derive(Clone, Debug)]
pub struct Generated {
    pub bits: BitStream,
    pub sidecar: Sidecar,
    pub report: ReportDocument,
}

fn bits_from_symbols(stream: &SymbolStream, extraction: &Extraction) -> Result<BitStream> {
    match extraction {
        Extraction::None => BitStream::try_from(stream),
        Extraction::Eliminate { zero, one } => eliminate(stream, (*zero, *one)),
        Extraction::Identify { class_zero, class_one } => {
            identify(stream, &Equipartition::new(stream.alphabet(), class_zero, class_one)?)
        }
    }
}

/// Per-side bits of the coincident pairs. Elimination keeps a pair only if
/// both sides survive, so the two streams stay aligned for XOR.
pub fn pair_bits(records: &[TrialRecord], dim: usize, extraction: &Extraction) -> Result<(BitStream, BitStream)> {
    let map: Vec<Option<u8>> = match extraction {
        Extraction::None if dim == 2 => vec![Some(0), Some(1)],
        Extraction::None => {
            return Err(Error::config(
                "keep",
                format!("{dim}-outcome pairs need --keep or --partition"),
            ))
        }
        Extraction::Eliminate { zero, one } => (0..dim as u32)
            .map(|s| match s {
                s if s == *zero => Some(0),
                s if s == *one => Some(1),
                _ => None,
            })
            .collect(),
        Extraction::Identify { class_zero, class_one } => {
            let part = Equipartition::new(dim as u32, class_zero, class_one)?;
            (0..dim as u32)
                .map(|s| Some(u8::from(part.class_one().contains(&s))))
                .collect()
        }
    };
    let (a, b): (Vec<u8>, Vec<u8>) = records
        .iter()
        .filter_map(|r| r.pair())
        .filter_map(|(a, b)| Some((map[a]?, map[b]?)))
        .unzip();
    Ok((BitStream::new(a)?, BitStream::new(b)?))
}

fn bias_quantity(bits: &BitStream) -> Quantity {
    match bias_estimate(bits) {
        Ok(v) => Quantity::estimate(v, bias_std_err(bits)),
        Err(_) => Quantity::exact(f64::NAN),
    }
}

fn provenance(protocol: &ProtocolConfig) -> Result<(Vec<String>, Vec<String>)> {
    let mut prov = Vec::new();
    let mut flags = Vec::new();
    let dim = protocol.dim();
    if dim >= 3 {
        prov.push(format!(
            "multi-outcome measurement: {dim} mutually exclusive outcomes per event"
        ));
    }
    match &protocol.setup {
        Setup::SingleConjugate {
            prep_basis, meas_basis, ..
        } => {
            let overlap = overlap_max(*prep_basis, *meas_basis, dim)?;
            prov.push(format!(
                "preparation/measurement mismatch: prepared in {} basis, measured in {} basis, max overlap {overlap:.6}",
                basis_name(prep_basis),
                basis_name(meas_basis)
            ));
            if (overlap - 1.0).abs() < 1e-9 {
                flags.push(
                    "preparation state is an element of the measurement basis; outcomes are deterministic".into(),
                );
            } else if (overlap - 1.0 / dim as f64).abs() < 1e-9 {
                prov.push("bases are mutually unbiased (maximally conjugate)".into());
            }
        }
        Setup::EprXor { spin, .. } => {
            prov.push(format!(
                "singlet pairs (spin {spin}); Alice's outcome masks Bob's via XOR"
            ));
        }
        Setup::EprAdaptive { spin, .. } => {
            prov.push(format!(
                "singlet pairs (spin {spin}) with delayed-choice adaptation; Alice's outcome masks Bob's via XOR"
            ));
        }
    }
    Ok((prov, flags))
}

fn overlap_max(a: BasisId, b: BasisId, dim: usize) -> Result<f64> {
    let t = overlap_table(&a.resolve(dim)?, &b.resolve(dim)?)?;
    Ok(t.iter().copied().fold(0.0, f64::max))
}

fn basis_name(b: &BasisId) -> String {
    match b {
        BasisId::Computational => "computational".into(),
        BasisId::Fourier => "fourier".into(),
        BasisId::SpinRotation { theta } => format!("spin-rotation({theta} rad)"),
    }
}

/// Runs the configured protocol and extraction in memory.
pub fn generate(cfg: &RunConfig) -> Result<Generated> {
    let output = cfg.protocol.run(cfg.workers)?;
    let mut config = serde_json::to_value(cfg)?;
    config["workers"] = cfg.workers.into();
    config["out"] = serde_json::to_value(&cfg.out)?;
    let mut report = ReportDocument::new("generate", config);
    let (prov, flags) = provenance(&cfg.protocol)?;
    report.provenance = prov;
    report.flags = flags;
    report.with_quantity("events", Quantity::exact(cfg.protocol.events as f64));
    let bits = match output {
        ProtocolOutput::Symbols { stream, no_clicks } => {
            report.with_quantity("no_clicks", Quantity::exact(no_clicks as f64));
            report.with_quantity("symbols", Quantity::exact(stream.len() as f64));
            bits_from_symbols(&stream, &cfg.extraction)?
        }
        ProtocolOutput::Pairs { dim, records } => {
            report.notes.push(LOCALITY_NOTE.to_string());
            let coincidences = records.iter().filter(|r| r.is_coincidence()).count();
            report.with_quantity("coincidences", Quantity::exact(coincidences as f64));
            report.with_quantity("discarded", Quantity::exact((records.len() - coincidences) as f64));
            let (a, b) = pair_bits(&records, dim, &cfg.extraction)?;
            report.with_quantity("bias_a", bias_quantity(&a));
            report.with_quantity("bias_b", bias_quantity(&b));
            if dim == 2 {
                let n = coincidences as f64;
                let agree = records.iter().filter_map(|r| r.pair()).filter(|(a, b)| a == b).count() as f64;
                if n > 0.0 {
                    let e = (2.0 * agree - n) / n;
                    report.with_quantity(
                        "correlation",
                        Quantity::estimate(e, ((1.0 - e * e).max(0.0) / n).sqrt()),
                    );
                }
            }
            xor_combine(&a, &b)?
        }
    };
    report.with_quantity("output_bits", Quantity::exact(bits.len() as f64));
    report.with_quantity("output_bias", bias_quantity(&bits));
    if !bits.is_empty() {
        report.suite = Some(run_suite(Stream::Bits(&bits), &SuiteConfig::full(cfg.significance))?);
    }
    let sidecar = Sidecar {
        version: TOOL_VERSION.to_string(),
        bit_length: bits.len() as u64,
        digest: stream_digest(Stream::Bits(&bits)),
        format: cfg.format,
        protocol: cfg.protocol.kind().to_string(),
        seed: cfg.protocol.seed,
        config: cfg.clone(),
    };
    Ok(Generated { bits, sidecar, report })
}

fn encode_payload(bits: &BitStream, format: PayloadFormat) -> Vec<u8> {
    let packed = pack_bits(bits);
    match format {
        PayloadFormat::Raw => packed,
        PayloadFormat::Hex => {
            let mut s = hex::encode(packed);
            s.push('\n');
            s.into_bytes()
        }
    }
}

/// Generates and writes payload, sidecar and report. Nothing is written
/// unless the configuration validates and generation succeeds.
pub fn cmd_generate(cfg: &RunConfig) -> Result<ReportDocument> {
    let out = cfg
        .out
        .clone()
        .ok_or_else(|| Error::config("out", "an output path is required"))?;
    let Generated {
        bits,
        sidecar,
        mut report,
    } = generate(cfg)?;
    let files = OutputFiles {
        payload: out.clone(),
        sidecar: sidecar_path(&out),
        report: report_path(&out),
    };
    report.output = Some(files.clone());
    fs::write(&files.payload, encode_payload(&bits, cfg.format))?;
    fs::write(&files.sidecar, serde_json::to_vec_pretty(&sidecar)?)?;
    fs::write(&files.report, serde_json::to_vec_pretty(&report)?)?;
    Ok(report)
}

/// Loads a payload and its sidecar, checking length and digest.
pub fn read_payload(path: &Path) -> Result<(BitStream, Sidecar)> {
    let side_path = sidecar_path(path);
    let side_text = fs::read(&side_path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::Format(format!("missing sidecar {}", side_path.display()))
        } else {
            Error::Io(e)
        }
    })?;
    let sidecar: Sidecar =
        serde_json::from_slice(&side_text).map_err(|e| Error::Format(format!("unreadable sidecar: {e}")))?;
    let raw = fs::read(path)?;
    let bytes = match sidecar.format {
        PayloadFormat::Raw => raw,
        PayloadFormat::Hex => {
            let text = std::str::from_utf8(&raw).map_err(|_| Error::Format("hex payload is not text".into()))?;
            hex::decode(text.trim()).map_err(|e| Error::Format(format!("bad hex payload: {e}")))?
        }
    };
    if bytes.len() as u64 != sidecar.bit_length.div_ceil(8) {
        return Err(Error::Integrity(format!(
            "payload holds {} bytes but sidecar records {} bits",
            bytes.len(),
            sidecar.bit_length
        )));
    }
    let bits = unpack_bits(&bytes, sidecar.bit_length).map_err(|e| Error::Integrity(e.to_string()))?;
    let digest = stream_digest(Stream::Bits(&bits));
    if digest != sidecar.digest {
        return Err(Error::Integrity(format!(
            "digest mismatch: payload {digest}, sidecar {}",
            sidecar.digest
        )));
    }
    Ok((bits, sidecar))
}

/// Runs the full battery on a stored stream.
pub fn cmd_analyze(path: &Path, significance: f64) -> Result<ReportDocument> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::config("significance", "must lie in (0, 1)"));
    }
    let (bits, sidecar) = read_payload(path)?;
    let config = serde_json::json!({
        "path": path,
        "significance": significance,
        "source": sidecar.config,
    });
    let mut report = ReportDocument::new("analyze", config);
    report.provenance = provenance(&sidecar.config.protocol)?.0;
    report.with_quantity("output_bits", Quantity::exact(bits.len() as f64));
    report.with_quantity("output_bias", bias_quantity(&bits));
    let suite = run_suite(Stream::Bits(&bits), &SuiteConfig::full(significance))?;
    report.flags.push("digest matches sidecar".into());
    report.suite = Some(suite);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Relative angles (Bob minus Alice), degrees.
    pub angles_deg: Vec<f64>,
    /// Marginal detector bias per side; the stick probability is `2 * epsilon`.
    pub biases: Vec<f64>,
    pub no_click_prob: f64,
    pub events: u64,
    pub seed: u64,
    pub block_size: u64,
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta_theta_deg: f64,
    pub epsilon: f64,
    pub coincidences: u64,
    pub xor_bias: f64,
    pub std_err: f64,
    /// `(1 - b)^2 cos^2(dtheta / 2) + b (1 - b) - 1/2` with stick probability `b = 2 epsilon`.
    pub predicted_bias: f64,
}

/// Closed-form XOR bias for spin-1/2 singlets with stick-to-1 detectors on both sides.
pub fn predicted_xor_bias(delta_theta: f64, epsilon: f64) -> f64 {
    let beta = 2.0 * epsilon;
    let anti = (delta_theta / 2.0).cos().powi(2);
    (1.0 - beta).powi(2) * anti + beta * (1.0 - beta) - 0.5
}

/// XOR-output bias over a grid of relative angles and detector biases.
pub fn cmd_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.angles_deg.is_empty() {
        return Err(Error::config("angles", "grid is empty"));
    }
    if cfg.biases.is_empty() {
        return Err(Error::config("biases", "grid is empty"));
    }
    if cfg.events == 0 {
        return Err(Error::config("events", "must be at least 1"));
    }
    if let Some(a) = cfg.angles_deg.iter().find(|a| !a.is_finite()) {
        return Err(Error::config("angles", format!("angle {a} is not finite")));
    }
    let master = RandomSource::new(cfg.seed);
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &eps in &cfg.biases {
        let det = DetectorModel {
            stick_prob: 2.0 * eps,
            preferred: 1,
            no_click_prob: cfg.no_click_prob,
        };
        det.validate_for(2)
            .map_err(|e| Error::config("biases", format!("epsilon {eps}: {e}")))?;
        for &deg in &cfg.angles_deg {
            let theta = deg.to_radians();
            let sampler = EprSampler::new(SpinLabel::Half, 0.0, theta)?;
            let records = run_blocks(
                cfg.events,
                cfg.block_size,
                cfg.workers,
                &master.fork(cell),
                |start, len, rng, out| out.extend((start..start + len).map(|i| sampler.trial(i, &det, &det, rng))),
            )?;
            let (a, b) = pair_bits(&records, 2, &Extraction::None)?;
            let s = xor_combine(&a, &b)?;
            let (xor_bias, std_err) = match bias_estimate(&s) {
                Ok(v) => (v, bias_std_err(&s)),
                Err(_) => (f64::NAN, f64::NAN),
            };
            rows.push(SweepRow {
                delta_theta_deg: deg,
                epsilon: eps,
                coincidences: s.len() as u64,
                xor_bias,
                std_err,
                predicted_bias: predicted_xor_bias(theta, eps),
            });
            cell += 1;
        }
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("delta_theta_deg,epsilon,coincidences,xor_bias,std_err,predicted_bias\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{:.6},{:.6}\n",
            r.delta_theta_deg, r.epsilon, r.coincidences, r.xor_bias, r.std_err, r.predicted_bias
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshConfig {
    pub alpha_deg: f64,
    pub alpha_prime_deg: f64,
    pub beta_deg: f64,
    pub beta_prime_deg: f64,
    pub events: u64,
    pub seed: u64,
    /// The violation flag requires `|S| - sigmas * SE > 2`.
    pub sigmas: f64,
}

impl ChshConfig {
    pub fn optimal(events: u64, seed: u64) -> Self {
        Self {
            alpha_deg: 0.0,
            alpha_prime_deg: 90.0,
            beta_deg: 45.0,
            beta_prime_deg: 135.0,
            events,
            seed,
            sigmas: 3.0,
        }
    }
}

pub const VIOLATION_FLAG: &str = "exceeds classical bound";

/// CHSH certification run.
pub fn cmd_chsh(cfg: &ChshConfig) -> Result<ReportDocument> {
    if cfg.events == 0 {
        return Err(Error::config("events", "must be at least 1"));
    }
    let angles = [cfg.alpha_deg, cfg.alpha_prime_deg, cfg.beta_deg, cfg.beta_prime_deg];
    if angles.iter().any(|a| !a.is_finite()) {
        return Err(Error::config("angles", "must be finite"));
    }
    if cfg.sigmas.is_nan() || cfg.sigmas < 0.0 {
        return Err(Error::config("sigmas", "must be non-negative"));
    }
    let mut rng = RandomSource::new(cfg.seed);
    let est = chsh_estimate(
        (cfg.alpha_deg.to_radians(), cfg.alpha_prime_deg.to_radians()),
        (cfg.beta_deg.to_radians(), cfg.beta_prime_deg.to_radians()),
        cfg.events,
        &mut rng,
    )?;
    let mut report = ReportDocument::new("chsh", serde_json::to_value(cfg)?);
    report.provenance.push(
        "CHSH test on spin-1/2 singlets: a violation of the classical bound certifies value indefiniteness".into(),
    );
    report.notes.push(LOCALITY_NOTE.to_string());
    report.with_quantity("S", Quantity::estimate(est.s, est.std_err));
    report.with_quantity("abs_S", Quantity::estimate(est.s.abs(), est.std_err));
    report.with_quantity("classical_bound", Quantity::exact(CLASSICAL_CHSH_BOUND));
    report.with_quantity("quantum_bound", Quantity::exact(QUANTUM_CHSH_BOUND));
    for (name, t) in ["E_ab", "E_ab'", "E_a'b", "E_a'b'"].iter().zip(&est.terms) {
        report.with_quantity(name, Quantity::estimate(t.value, t.std_err));
    }
    if est.violates_classical_bound(cfg.sigmas) {
        report.flags.push(VIOLATION_FLAG.to_string());
    }
    Ok(report)
}

pub fn write_json<T: Serialize>(path: Option<&PathBuf>, value: &T) -> Result<String> {
    let text = serde_json::to_string_pretty(value)?;
    if let Some(p) = path {
        fs::write(p, &text)?;
    }
    Ok(text)
}
