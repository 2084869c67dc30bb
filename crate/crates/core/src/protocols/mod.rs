//! Generation protocols.
//!
//! * single-conjugate: a d-level system prepared in one basis and measured
//!   in a conjugate one, so every outcome is a Born-rule coin toss over d
//!   mutually exclusive results.
//! * epr-xor: singlet pairs measured at fixed angles; the two sides are
//!   later XOR-combined.
//! * epr-adaptive: Bob's angle chosen from Alice's reported outcome.
//!
//! Bulk generation runs in blocks, block `i` drawing from substream `i`, so
//! output is independent of the worker count.

mod detector;
mod epr;
mod estimate;
mod runner;
mod single;

use serde::{Deserialize, Serialize};

pub use detector::{apply_detector, DetectorModel};
pub use epr::{
    adaptive_epr_trial, epr_trial, rotated_state_residual, singlet_state, AdaptationMap, AdaptiveSampler, EprSampler,
    TrialRecord,
};
pub use estimate::{
    chsh_estimate, correlation_at, correlation_estimate, ChshEstimate, CorrelationEstimate, CLASSICAL_CHSH_BOUND,
    QUANTUM_CHSH_BOUND,
};
pub use runner::run_blocks;
pub use single::{prepare_basis_state, single_trial, SingleSampler};

use crate::error::{Error, Result};
use crate::extract::SymbolStream;
pub use crate::qcore::SpinLabel;
use crate::qcore::{fourier_basis, spin_rotation_basis, Basis, RandomSource};

/// Named measurement/preparation basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "kebab-case")]
pub enum BasisId {
    Computational,
    Fourier,
    /// y-rotated spin basis; requires d in {2, 3, 4}.
    SpinRotation {
        theta: f64,
    },
}

impl BasisId {
    pub fn resolve(&self, dim: usize) -> Result<Basis> {
        match *self {
            BasisId::Computational => Basis::computational(dim),
            BasisId::Fourier => fourier_basis(dim),
            BasisId::SpinRotation { theta } => spin_rotation_basis(SpinLabel::from_dim(dim)?, theta),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    SingleConjugate,
    EprXor,
    EprAdaptive,
}

impl std::fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProtocolKind::SingleConjugate => "single-conjugate",
            ProtocolKind::EprXor => "epr-xor",
            ProtocolKind::EprAdaptive => "epr-adaptive",
        })
    }
}

/// Kind-specific parameters. Angles are radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Setup {
    SingleConjugate {
        dim: usize,
        prep_basis: BasisId,
        prep_index: usize,
        meas_basis: BasisId,
        detector: DetectorModel,
    },
    EprXor {
        spin: SpinLabel,
        theta_a: f64,
        theta_b: f64,
        det_a: DetectorModel,
        det_b: DetectorModel,
    },
    EprAdaptive {
        spin: SpinLabel,
        theta_a: f64,
        /// Bob's angle for each of Alice's outcomes.
        adapt: Vec<f64>,
        det_a: DetectorModel,
        det_b: DetectorModel,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub setup: Setup,
    pub events: u64,
    pub seed: u64,
    pub block_size: u64,
}

/// Raw protocol output before extraction.
#[derive(Clone, Debug, PartialEq)]
pub enum ProtocolOutput {
    /// Single-particle outcomes with no-clicks already dropped.
    Symbols { stream: SymbolStream, no_clicks: u64 },
    /// Every pair trial, including discarded ones.
    Pairs { dim: usize, records: Vec<TrialRecord> },
}

impl ProtocolConfig {
    pub fn kind(&self) -> ProtocolKind {
        match self.setup {
            Setup::SingleConjugate { .. } => ProtocolKind::SingleConjugate,
            Setup::EprXor { .. } => ProtocolKind::EprXor,
            Setup::EprAdaptive { .. } => ProtocolKind::EprAdaptive,
        }
    }

    /// Outcome alphabet size per side.
    pub fn dim(&self) -> usize {
        match &self.setup {
            Setup::SingleConjugate { dim, .. } => *dim,
            Setup::EprXor { spin, .. } | Setup::EprAdaptive { spin, .. } => spin.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.events == 0 {
            return Err(Error::config("events", "must be at least 1"));
        }
        if self.block_size == 0 {
            return Err(Error::config("block_size", "must be at least 1"));
        }
        let dim = self.dim();
        match &self.setup {
            Setup::SingleConjugate {
                dim,
                prep_basis,
                prep_index,
                meas_basis,
                detector,
            } => {
                if *dim < 2 {
                    return Err(Error::config("dim", "must be at least 2"));
                }
                prep_basis
                    .resolve(*dim)
                    .map_err(|e| Error::config("prep_basis", e.to_string()))?;
                meas_basis
                    .resolve(*dim)
                    .map_err(|e| Error::config("meas_basis", e.to_string()))?;
                if prep_index >= dim {
                    return Err(Error::config("prep_index", format!("must be below {dim}")));
                }
                detector
                    .validate_for(*dim)
                    .map_err(|e| Error::config("detector", e.to_string()))?;
            }
            Setup::EprXor {
                theta_a,
                theta_b,
                det_a,
                det_b,
                ..
            } => {
                for (name, t) in [("theta_a", theta_a), ("theta_b", theta_b)] {
                    if !t.is_finite() {
                        return Err(Error::config(name, "must be finite"));
                    }
                }
                det_a
                    .validate_for(dim)
                    .map_err(|e| Error::config("detector_a", e.to_string()))?;
                det_b
                    .validate_for(dim)
                    .map_err(|e| Error::config("detector_b", e.to_string()))?;
            }
            Setup::EprAdaptive {
                theta_a,
                adapt,
                det_a,
                det_b,
                ..
            } => {
                if !theta_a.is_finite() {
                    return Err(Error::config("theta_a", "must be finite"));
                }
                AdaptationMap::new(adapt.clone())
                    .and_then(|m| m.check_total(dim))
                    .map_err(|e| Error::config("adapt", e.to_string()))?;
                det_a
                    .validate_for(dim)
                    .map_err(|e| Error::config("detector_a", e.to_string()))?;
                det_b
                    .validate_for(dim)
                    .map_err(|e| Error::config("detector_b", e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Runs all `events` trials on `workers` threads.
    pub fn run(&self, workers: usize) -> Result<ProtocolOutput> {
        self.validate()?;
        let master = RandomSource::new(self.seed);
        match &self.setup {
            Setup::SingleConjugate {
                dim,
                prep_basis,
                prep_index,
                meas_basis,
                detector,
            } => {
                let prep = prepare_basis_state(&prep_basis.resolve(*dim)?, *prep_index)?;
                let sampler = SingleSampler::new(&prep, &meas_basis.resolve(*dim)?)?;
                let raw: Vec<Option<u32>> =
                    run_blocks(self.events, self.block_size, workers, &master, |_, len, rng, out| {
                        out.extend((0..len).map(|_| sampler.trial(detector, rng).map(|k| k as u32)))
                    })?;
                let no_clicks = raw.iter().filter(|o| o.is_none()).count() as u64;
                let stream = SymbolStream::new(*dim as u32, raw.into_iter().flatten().collect())?;
                Ok(ProtocolOutput::Symbols { stream, no_clicks })
            }
            Setup::EprXor {
                spin,
                theta_a,
                theta_b,
                det_a,
                det_b,
            } => {
                let sampler = EprSampler::new(*spin, *theta_a, *theta_b)?;
                let records = run_blocks(
                    self.events,
                    self.block_size,
                    workers,
                    &master,
                    |start, len, rng, out| {
                        out.extend((start..start + len).map(|i| sampler.trial(i, det_a, det_b, rng)))
                    },
                )?;
                Ok(ProtocolOutput::Pairs {
                    dim: spin.dim(),
                    records,
                })
            }
            Setup::EprAdaptive {
                spin,
                theta_a,
                adapt,
                det_a,
                det_b,
            } => {
                let sampler = AdaptiveSampler::new(*spin, *theta_a, AdaptationMap::new(adapt.clone())?)?;
                let records = run_blocks(
                    self.events,
                    self.block_size,
                    workers,
                    &master,
                    |start, len, rng, out| {
                        out.extend((start..start + len).map(|i| sampler.trial(i, det_a, det_b, rng)))
                    },
                )?;
                Ok(ProtocolOutput::Pairs {
                    dim: spin.dim(),
                    records,
                })
            }
        }
    }
}
