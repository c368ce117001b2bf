//! Provenance attached to every artifact. The embedded copy leaves out the
//! timestamp so that reruns are byte-identical; the sidecar carries it.

use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// Flag values, output paths excluded.
    pub parameters: Map<String, Value>,
    pub seed: u64,
    pub tool_version: String,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    #[serde(flatten)]
    manifest: &'a RunManifest,
    timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, parameters: &impl Serialize, seed: u64) -> Self {
        let parameters = match serde_json::to_value(parameters) {
            Ok(Value::Object(map)) => map,
            _ => Map::new(),
        };
        Self { command: command.into(), parameters, seed, tool_version: TOOL_VERSION.into() }
    }

    pub fn json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }

    /// `# manifest: {...}` for line-oriented outputs.
    pub fn comment_line(&self) -> String {
        format!("# manifest: {}\n", self.json())
    }

    /// Writes `<path>.manifest.json` next to an artifact.
    pub fn write_sidecar(&self, artifact: &Path) -> Result<(), CliError> {
        let sidecar = Sidecar { manifest: self, timestamp: timestamp() };
        let mut text = serde_json::to_string_pretty(&sidecar)?;
        text.push('\n');
        std::fs::write(sidecar_path(artifact), text)?;
        Ok(())
    }
}

pub fn sidecar_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// UTC, from `SOURCE_DATE_EPOCH` when set so that sidecars are reproducible too.
fn timestamp() -> String {
    let pinned = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0));
    pinned.unwrap_or_else(Utc::now).to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Writes every artifact, then its sidecar. Nothing is written unless all
/// contents were produced.
pub fn emit(manifest: &RunManifest, artifacts: &[(&Path, &str)]) -> Result<(), CliError> {
    for (path, content) in artifacts {
        std::fs::write(path, content)
            .map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display())))?;
        manifest.write_sidecar(path)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_epoch_gives_iso_utc() {
        std::env::set_var("SOURCE_DATE_EPOCH", "0");
        assert_eq!(timestamp(), "1970-01-01T00:00:00Z");
    }

    #[test]
    fn sidecar_sits_beside_the_artifact() {
        assert_eq!(sidecar_path(Path::new("out/a.csv")), PathBuf::from("out/a.csv.manifest.json"));
    }
}
