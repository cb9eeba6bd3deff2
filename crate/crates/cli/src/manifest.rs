use serde::{Deserialize, Serialize};

/// Provenance block embedded in every output file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub seed: u64,
    pub prng: String,
    pub version: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
}

impl RunManifest {
    /// `timestamp` overrides the wall clock, for reproducible files.
    pub fn new(command: &str, arguments: Vec<String>, seed: u64, timestamp: Option<String>) -> Self {
        Self {
            command: command.to_string(),
            arguments,
            seed,
            prng: bosent::PRNG_NAME.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp
                .unwrap_or_else(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
        }
    }
}

/// `{"manifest": ..., "report": ...}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document<R> {
    pub manifest: RunManifest,
    pub report: R,
}
