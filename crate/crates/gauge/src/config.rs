//! Run configuration (TOML) and report provenance.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::GaugeError;
use crate::group::Group;
use crate::region::{Boundary, Region};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Start {
    #[default]
    Cold,
    Hot,
}

/// Every key is optional in the file; missing keys take the defaults below.
///
/// ```toml
/// dimension = 2
/// extent = [4, 4]        # vertices per axis; defaults to 4 along each axis
/// boundary = "free"      # or "periodic"
/// group = "SU"           # or "SO"
/// N = 3
/// beta = 0.2
/// epsilon = 0.3          # initial proposal width
/// tune = true            # adapt epsilon during burn-in only
/// hits = 9               # proposals per link visit; defaults to N²
/// sweeps = 10000         # measured sweeps per replica
/// burn_in = 1000
/// replicas = 1
/// seed = 1
/// start = "cold"         # or "hot"
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    pub extent: Vec<i32>,
    pub boundary: Boundary,
    pub group: Group,
    #[serde(rename = "N")]
    pub n: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub tune: bool,
    pub target_acceptance: f64,
    pub hits: Option<usize>,
    pub sweeps: usize,
    pub burn_in: usize,
    pub replicas: usize,
    pub seed: u64,
    pub start: Start,
    /// Sweeps between group-membership checks.
    pub check_every: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dimension: 2,
            extent: Vec::new(),
            boundary: Boundary::Free,
            group: Group::SU,
            n: 3,
            beta: 0.0,
            epsilon: 0.3,
            tune: true,
            target_acceptance: 0.5,
            hits: None,
            sweeps: 10_000,
            burn_in: 1_000,
            replicas: 1,
            seed: 1,
            start: Start::Cold,
            check_every: 10,
        }
    }
}

/// Drift above which a link is re-projected onto the group.
pub const REPAIR_TOL: f64 = 1e-12;

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, GaugeError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| GaugeError::Config(e.to_string()))?;
        cfg.validated()
    }

    pub fn validated(mut self) -> Result<Self, GaugeError> {
        if self.extent.is_empty() {
            self.extent = vec![4; self.dimension];
        }
        if self.extent.len() != self.dimension {
            return Err(GaugeError::Config(format!(
                "extent has {} axes but dimension is {}",
                self.extent.len(),
                self.dimension
            )));
        }
        if self.n < 2 {
            return Err(GaugeError::SmallN(self.n));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(GaugeError::Config("epsilon must lie in (0, 1)".into()));
        }
        if self.replicas == 0 || self.check_every == 0 {
            return Err(GaugeError::Config("replicas and check_every must be positive".into()));
        }
        Ok(self)
    }

    pub fn hits(&self) -> usize {
        self.hits.unwrap_or(self.n * self.n)
    }

    pub fn region(&self) -> Result<Arc<Region>, GaugeError> {
        Ok(Arc::new(Region::new(&self.extent, self.boundary)?))
    }

    /// sha256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub config_hash: String,
    pub commit: String,
    pub version: &'static str,
}

impl Provenance {
    pub fn new(cfg: &RunConfig) -> Self {
        Provenance { seed: cfg.seed, config_hash: cfg.hash(), commit: commit(), version: env!("CARGO_PKG_VERSION") }
    }
}

/// `git rev-parse HEAD` of the working directory, or "unknown".
pub fn commit() -> String {
    std::process::Command::new("git")
        .args(["rev-parse", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .unwrap_or_else(|| "unknown".into())
}
