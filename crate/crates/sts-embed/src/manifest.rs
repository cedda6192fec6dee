//! Everything needed to replay a run.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<InputDigest>,
    pub version: &'static str,
}

impl RunManifest {
    pub fn new(command: &str, config: impl Serialize) -> Self {
        Self {
            command: command.to_owned(),
            config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
            seeds: BTreeMap::new(),
            inputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn seed(mut self, name: &str, value: u64) -> Self {
        self.seeds.insert(name.to_owned(), value);
        self
    }

    pub fn input(&mut self, path: &Path, contents: &str) {
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(contents.as_bytes())),
        });
    }
}
