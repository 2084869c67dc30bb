use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::Equipartition;
use crate::protocols::{BasisId, DetectorModel, ProtocolConfig, ProtocolKind, Setup, SpinLabel};
use crate::statkit::DEFAULT_SIGNIFICANCE;

pub const DEFAULT_BLOCK_SIZE: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PayloadFormat {
    /// MSB-first packed bytes.
    Raw,
    /// The same bytes as lowercase hex text.
    Hex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    SingleConjugate,
    EprXor,
    EprAdaptive,
}

impl From<ProtocolArg> for ProtocolKind {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::SingleConjugate => ProtocolKind::SingleConjugate,
            ProtocolArg::EprXor => ProtocolKind::EprXor,
            ProtocolArg::EprAdaptive => ProtocolKind::EprAdaptive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Computational,
    Fourier,
}

impl From<BasisArg> for BasisId {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Computational => BasisId::Computational,
            BasisArg::Fourier => BasisId::Fourier,
        }
    }
}

/// Downgrading applied to each side's outcomes before bits are emitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Extraction {
    /// Outcomes are already bits (d = 2).
    None,
    Eliminate {
        zero: u32,
        one: u32,
    },
    Identify {
        class_zero: Vec<u32>,
        class_one: Vec<u32>,
    },
}

/// Flags shared by every command that runs a protocol.
#[derive(Args, Clone, Debug)]
pub struct ProtocolArgs {
    /// Protocol to run.
    #[arg(long, value_enum, default_value = "single-conjugate")]
    pub protocol: ProtocolArg,
    /// Outcome count per measurement (single-conjugate), or 2j+1 for EPR protocols.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Particle spin for EPR protocols: 1/2, 1 or 3/2.
    #[arg(long)]
    pub spin: Option<String>,
    /// Preparation basis (single-conjugate).
    #[arg(long, value_enum, default_value = "computational")]
    pub prep_basis: BasisArg,
    /// Index of the prepared basis element.
    #[arg(long, default_value_t = 0)]
    pub prep_index: usize,
    /// Measurement basis (single-conjugate).
    #[arg(long, value_enum, default_value = "fourier")]
    pub meas_basis: BasisArg,
    /// Alice's measurement angle in degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_a: f64,
    /// Bob's measurement angle in degrees (epr-xor).
    #[arg(long, default_value_t = 90.0, allow_negative_numbers = true)]
    pub theta_b: f64,
    /// Bob's angle per Alice outcome, degrees: `0:90,1:90` (epr-adaptive).
    #[arg(long)]
    pub adapt: Option<String>,
    /// Stick probability: chance a detector reports its preferred outcome regardless of the truth.
    #[arg(long, default_value_t = 0.0)]
    pub detector_bias: f64,
    /// Outcome index a sticking detector reports.
    #[arg(long, default_value_t = 1)]
    pub detector_preferred: usize,
    /// Probability that a detection event is lost.
    #[arg(long, default_value_t = 0.0)]
    pub no_click_prob: f64,
    /// Number of simulated events.
    #[arg(long)]
    pub events: u64,
    /// Master seed (required; runs are never seeded implicitly).
    #[arg(long)]
    pub seed: u64,
    /// Events per substream block.
    #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
    pub block_size: u64,
    /// Worker threads; output does not depend on this.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Keep two symbols and drop the rest: `a,b` maps a to 0 and b to 1.
    #[arg(long, conflicts_with = "partition")]
    pub keep: Option<String>,
    /// Equipartition `a,b|c,d` mapping the first class to 0 and the second to 1.
    #[arg(long)]
    pub partition: Option<String>,
    /// Significance level for the statistical battery.
    #[arg(long, default_value_t = DEFAULT_SIGNIFICANCE)]
    pub significance: f64,
}

/// Fully resolved generation parameters; this is what reports embed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub protocol: ProtocolConfig,
    pub extraction: Extraction,
    /// Human-facing angles as given, degrees.
    pub theta_a_deg: Option<f64>,
    pub theta_b_deg: Option<f64>,
    pub adapt_deg: Option<Vec<f64>>,
    /// Not part of the stream's identity: omitted from sidecars so output
    /// files are byte-identical across worker counts and locations.
    #[serde(skip_serializing, default = "one_worker")]
    pub workers: usize,
    pub significance: f64,
    pub format: PayloadFormat,
    #[serde(skip_serializing, default)]
    pub out: Option<PathBuf>,
}

fn one_worker() -> usize {
    1
}

fn parse_pair(field: &str, s: &str) -> Result<(u32, u32)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => {
            let p = |t: &str| {
                t.parse::<u32>()
                    .map_err(|_| Error::config(field, format!("bad symbol `{t}`")))
            };
            Ok((p(a)?, p(b)?))
        }
        _ => Err(Error::config(field, format!("expected `a,b`, got `{s}`"))),
    }
}

/// Parses `0:90,1:90` into per-outcome angles in degrees.
pub fn parse_adapt(s: &str, dim: usize) -> Result<Vec<f64>> {
    let mut angles = vec![None; dim];
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = item
            .split_once(':')
            .ok_or_else(|| Error::config("adapt", format!("expected `outcome:degrees`, got `{item}`")))?;
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| Error::config("adapt", format!("bad outcome `{k}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::config("adapt", format!("bad angle `{v}`")))?;
        if k >= dim {
            return Err(Error::config("adapt", format!("outcome {k} outside 0..{dim}")));
        }
        if !v.is_finite() {
            return Err(Error::config("adapt", format!("angle for outcome {k} is not finite")));
        }
        angles[k] = Some(v);
    }
    angles
        .into_iter()
        .enumerate()
        .map(|(k, a)| a.ok_or_else(|| Error::config("adapt", format!("no angle for outcome {k}"))))
        .collect()
}

fn check_significance(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config("significance", "must lie in (0, 1)"));
    }
    Ok(())
}

impl ProtocolArgs {
    fn spin_label(&self) -> Result<SpinLabel> {
        match (&self.spin, self.dim) {
            (Some(s), dim) => {
                let spin: SpinLabel = s.parse()?;
                if dim.is_some_and(|d| d != spin.dim()) {
                    return Err(Error::config(
                        "dim",
                        format!("spin {spin} has dimension {}", spin.dim()),
                    ));
                }
                Ok(spin)
            }
            (None, Some(d)) => {
                SpinLabel::from_dim(d).map_err(|_| Error::config("dim", format!("no spin has dimension {d}")))
            }
            (None, None) => Ok(SpinLabel::Half),
        }
    }

    fn detector(&self, field: &str, dim: usize) -> Result<DetectorModel> {
        let det = DetectorModel {
            stick_prob: self.detector_bias,
            preferred: self.detector_preferred,
            no_click_prob: self.no_click_prob,
        };
        det.validate_for(dim).map_err(|e| Error::config(field, e.to_string()))?;
        Ok(det)
    }

    /// Validates every flag and resolves the run; errors name the offending field.
    pub fn resolve(&self, format: PayloadFormat, out: Option<PathBuf>) -> Result<RunConfig> {
        if self.events == 0 {
            return Err(Error::config("events", "must be at least 1"));
        }
        if self.block_size == 0 {
            return Err(Error::config("block-size", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::config("workers", "must be at least 1"));
        }
        check_significance(self.significance)?;
        for (name, t) in [("theta-a", self.theta_a), ("theta-b", self.theta_b)] {
            if !t.is_finite() {
                return Err(Error::config(name, "must be finite"));
            }
        }
        let kind: ProtocolKind = self.protocol.into();
        let (setup, theta_a_deg, theta_b_deg, adapt_deg) = match kind {
            ProtocolKind::SingleConjugate => {
                let dim = self
                    .dim
                    .ok_or_else(|| Error::config("dim", "required for single-conjugate"))?;
                if !(2..=64).contains(&dim) {
                    return Err(Error::config("dim", "must lie in 2..=64"));
                }
                if self.prep_index >= dim {
                    return Err(Error::config("prep-index", format!("must be below {dim}")));
                }
                let setup = Setup::SingleConjugate {
                    dim,
                    prep_basis: self.prep_basis.into(),
                    prep_index: self.prep_index,
                    meas_basis: self.meas_basis.into(),
                    detector: self.detector("detector-bias", dim)?,
                };
                (setup, None, None, None)
            }
            ProtocolKind::EprXor => {
                let spin = self.spin_label()?;
                let det = self.detector("detector-bias", spin.dim())?;
                let setup = Setup::EprXor {
                    spin,
                    theta_a: self.theta_a.to_radians(),
                    theta_b: self.theta_b.to_radians(),
                    det_a: det,
                    det_b: det,
                };
                (setup, Some(self.theta_a), Some(self.theta_b), None)
            }
            ProtocolKind::EprAdaptive => {
                let spin = self.spin_label()?;
                let det = self.detector("detector-bias", spin.dim())?;
                let adapt = self
                    .adapt
                    .as_deref()
                    .ok_or_else(|| Error::config("adapt", "required for epr-adaptive"))?;
                let adapt_deg = parse_adapt(adapt, spin.dim())?;
                let setup = Setup::EprAdaptive {
                    spin,
                    theta_a: self.theta_a.to_radians(),
                    adapt: adapt_deg.iter().map(|d| d.to_radians()).collect(),
                    det_a: det,
                    det_b: det,
                };
                (setup, Some(self.theta_a), None, Some(adapt_deg))
            }
        };
        let protocol = ProtocolConfig {
            setup,
            events: self.events,
            seed: self.seed,
            block_size: self.block_size,
        };
        let dim = protocol.dim() as u32;
        let extraction = match (&self.keep, &self.partition) {
            (Some(k), _) => {
                let (zero, one) = parse_pair("keep", k)?;
                if zero == one || zero >= dim || one >= dim {
                    return Err(Error::config("keep", format!("need two distinct symbols below {dim}")));
                }
                Extraction::Eliminate { zero, one }
            }
            (None, Some(p)) => {
                let part = Equipartition::parse(dim, p).map_err(|e| Error::config("partition", e.to_string()))?;
                Extraction::Identify {
                    class_zero: part.class_zero().iter().copied().collect(),
                    class_one: part.class_one().iter().copied().collect(),
                }
            }
            (None, None) if dim == 2 => Extraction::None,
            (None, None) => {
                return Err(Error::config(
                    "keep",
                    format!("{dim}-outcome streams need --keep or --partition to become bits"),
                ))
            }
        };
        protocol.validate()?;
        Ok(RunConfig {
            protocol,
            extraction,
            theta_a_deg,
            theta_b_deg,
            adapt_deg,
            workers: self.workers,
            significance: self.significance,
            format,
            out,
        })
    }
}
