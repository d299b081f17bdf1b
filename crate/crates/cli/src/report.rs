//! Run reports and output writing.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::run::Outcome;

pub const RESOLVED_CONFIG: &str = "resolved_config.toml";
pub const REPORT: &str = "report.json";
pub const METRICS: &str = "metrics.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario_id: String,
    pub kind: String,
    pub toolkit_version: String,
    /// SHA-256 of `resolved_config.toml`, hex.
    pub config_hash: String,
    pub seed: u64,
    /// Non-finite values are written as `null`.
    pub metrics: BTreeMap<String, Option<f64>>,
    /// File names relative to the output directory.
    pub artifacts: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn finite(m: &BTreeMap<String, f64>) -> BTreeMap<String, Option<f64>> {
    m.iter().map(|(k, v)| (k.clone(), v.is_finite().then_some(*v))).collect()
}

/// Writes the resolved config, every artifact, the metrics and the report.
pub fn write_run(dir: &Path, kind: &str, seed: u64, resolved: &str, out: &Outcome) -> std::io::Result<RunReport> {
    fs::create_dir_all(dir)?;
    let hash = sha256_hex(resolved.as_bytes());
    fs::write(dir.join(RESOLVED_CONFIG), resolved)?;
    let mut artifacts = vec![RESOLVED_CONFIG.to_string()];
    for (name, body) in &out.artifacts {
        fs::write(dir.join(name), body)?;
        artifacts.push(name.clone());
    }
    let metrics = finite(&out.metrics);
    fs::write(dir.join(METRICS), serde_json::to_string_pretty(&metrics).expect("metrics serialize") + "\n")?;
    artifacts.push(METRICS.to_string());
    let report = RunReport {
        scenario_id: format!("{kind}-{}", &hash[..12]),
        kind: kind.to_string(),
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: hash,
        seed,
        metrics,
        artifacts,
    };
    fs::write(dir.join(REPORT), serde_json::to_string_pretty(&report).expect("report serializes") + "\n")?;
    Ok(report)
}

/// Loads `report.json` from `dir` and checks the recorded hash against
/// the resolved config next to it.
pub fn verify(dir: &Path) -> Result<RunReport, String> {
    let text = fs::read_to_string(dir.join(REPORT)).map_err(|e| format!("{}: {e}", dir.join(REPORT).display()))?;
    let report: RunReport = serde_json::from_str(&text).map_err(|e| format!("{REPORT}: {e}"))?;
    let cfg = fs::read(dir.join(RESOLVED_CONFIG)).map_err(|e| format!("{RESOLVED_CONFIG}: {e}"))?;
    let got = sha256_hex(&cfg);
    if got != report.config_hash {
        return Err(format!("config hash mismatch: report has {}, {RESOLVED_CONFIG} hashes to {got}", report.config_hash));
    }
    for a in &report.artifacts {
        if !dir.join(a).is_file() {
            return Err(format!("artifact `{a}` listed in the report is missing"));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
