use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::codes::Axis;
use crate::graph::ExposomeParams;
use crate::ingest::KeyMode;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunParameters {
    pub d: usize,
    pub eta: u64,
    pub key_mode: KeyMode,
    pub agg_levels: BTreeMap<Axis, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Command-specific settings.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

impl RunParameters {
    pub fn new(params: ExposomeParams, key_mode: KeyMode) -> Self {
        RunParameters {
            d: params.d,
            eta: params.eta,
            key_mode,
            agg_levels: BTreeMap::new(),
            seed: None,
            extra: BTreeMap::new(),
        }
    }
}

/// What went into a run: inputs with their digests, parameters, tool
/// version. The timestamp comes from `SOURCE_DATE_EPOCH` when set and is
/// otherwise left out, so repeated runs produce identical bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub inputs: Vec<InputDigest>,
    pub parameters: RunParameters,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl RunManifest {
    pub fn new(parameters: RunParameters) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Vec::new(),
            parameters,
            timestamp: std::env::var("SOURCE_DATE_EPOCH").ok().filter(|s| !s.trim().is_empty()),
        }
    }

    pub fn add_input(&mut self, path: &Path, content: &[u8]) {
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(content)),
        });
    }

    /// SHA-256 of the manifest's canonical JSON.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("manifest serializes");
        hex::encode(Sha256::digest(&json))
    }

    /// Short single-line reference for formats that cannot embed JSON.
    pub fn reference(&self) -> String {
        format!(
            "{} {} D={} eta={} key_mode={} manifest sha256:{}",
            self.tool, self.version, self.parameters.d, self.parameters.eta, self.parameters.key_mode,
            self.digest()
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }
}
