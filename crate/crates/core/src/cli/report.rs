use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{PayloadFormat, RunConfig};
use crate::statkit::SuiteResult;

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SURROGATE_NOTE: &str =
    "statistical battery checks finite-sample distributional properties only; it cannot certify algorithmic randomness";
pub const LOCALITY_NOTE: &str =
    "simulated pairs have no spacelike separation; locality is a physical assumption not modeled here";

/// Sidecar written next to every bit payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Sidecar {
    pub version: String,
    pub bit_length: u64,
    /// `sha256:<hex>` of the packed payload bytes (before hex encoding).
    pub digest: String,
    pub format: PayloadFormat,
    pub protocol: String,
    pub seed: u64,
    pub config: RunConfig,
}

/// Estimated quantity with its standard error when one applies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub std_err: Option<f64>,
}

impl Quantity {
    pub fn exact(value: f64) -> Self {
        Self { value, std_err: None }
    }

    pub fn estimate(value: f64, std_err: f64) -> Self {
        Self {
            value,
            std_err: Some(std_err),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFiles {
    pub payload: PathBuf,
    pub sidecar: PathBuf,
    pub report: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Resolved configuration, including every default.
    pub config: serde_json::Value,
    /// Which generation criteria this run exercises.
    pub provenance: Vec<String>,
    pub suite: Option<SuiteResult>,
    pub derived: BTreeMap<String, Quantity>,
    pub flags: Vec<String>,
    pub notes: Vec<String>,
    pub output: Option<OutputFiles>,
}

impl ReportDocument {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            config,
            provenance: Vec::new(),
            suite: None,
            derived: BTreeMap::new(),
            flags: Vec::new(),
            notes: vec![SURROGATE_NOTE.to_string()],
            output: None,
        }
    }

    pub fn with_quantity(&mut self, key: &str, q: Quantity) -> &mut Self {
        self.derived.insert(key.to_string(), q);
        self
    }
}

pub fn sidecar_path(payload: &Path) -> PathBuf {
    let mut s = payload.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn report_path(payload: &Path) -> PathBuf {
    let mut s = payload.as_os_str().to_owned();
    s.push(".report.json");
    PathBuf::from(s)
}
