//! Run manifests embedded in every emitted CSV as `#`-prefixed header
//! comments: tool version, subcommand, master seed, config digest, and the
//! resolved config itself. Headers parse back into a [`RunManifest`], and
//! re-rendering a parsed header is byte-identical.

use crate::config::ConfigError;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub version: String,
    pub subcommand: String,
    pub seed: u64,
    pub digest: String,
    pub config: BTreeMap<String, String>,
}

/// First 8 bytes of SHA-256 over the canonical `key = value` rendering,
/// as 16 hex characters.
pub fn config_digest(config: &BTreeMap<String, String>) -> String {
    let canonical = crate::config::render_config(config);
    let hash = Sha256::digest(canonical.as_bytes());
    hash[..8].iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64, config: BTreeMap<String, String>) -> Self {
        let digest = config_digest(&config);
        RunManifest {
            version: TOOL_VERSION.to_string(),
            subcommand: subcommand.to_string(),
            seed,
            digest,
            config,
        }
    }

    /// The `#` comment block heading every CSV file.
    pub fn render_header(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# rwrs {}\n", self.version));
        out.push_str(&format!("# subcommand: {}\n", self.subcommand));
        out.push_str(&format!("# seed: {}\n", self.seed));
        out.push_str(&format!("# digest: {}\n", self.digest));
        for (k, v) in &self.config {
            out.push_str(&format!("# config.{k}: {v}\n"));
        }
        out
    }

    /// Parse the comment block back (ignores anything after the first
    /// non-comment line).
    pub fn parse_csv_header(text: &str) -> Result<RunManifest, ConfigError> {
        let mut version = None;
        let mut subcommand = None;
        let mut seed = None;
        let mut digest = None;
        let mut config = BTreeMap::new();
        for line in text.lines() {
            let Some(body) = line.strip_prefix('#') else {
                break;
            };
            let body = body.trim();
            if let Some(v) = body.strip_prefix("rwrs ") {
                let v = v.trim();
                if v.is_empty() || v.chars().any(|c| c.is_control()) {
                    return Err(ConfigError("bad version".into()));
                }
                version = Some(v.to_string());
            } else if let Some(v) = body.strip_prefix("subcommand:") {
                let v = v.trim();
                if v.is_empty() || !v.chars().all(|c| c.is_ascii_alphanumeric()) {
                    return Err(ConfigError("bad subcommand".into()));
                }
                subcommand = Some(v.to_string());
            } else if let Some(v) = body.strip_prefix("seed:") {
                seed = Some(
                    v.trim()
                        .parse::<u64>()
                        .map_err(|_| ConfigError("bad seed".into()))?,
                );
            } else if let Some(v) = body.strip_prefix("digest:") {
                let v = v.trim();
                if v.len() != 16 || !v.chars().all(|c| c.is_ascii_hexdigit() && !c.is_uppercase())
                {
                    return Err(ConfigError("bad digest".into()));
                }
                digest = Some(v.to_string());
            } else if let Some(rest) = body.strip_prefix("config.") {
                let (k, v) = rest
                    .split_once(':')
                    .ok_or_else(|| ConfigError("bad config line".into()))?;
                let (k, v) = (k.trim(), v.trim());
                if k.is_empty()
                    || !k
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
                {
                    return Err(ConfigError("bad config key".into()));
                }
                if v.is_empty() || v.chars().any(|c| c.is_control()) {
                    return Err(ConfigError("bad config value".into()));
                }
                config.insert(k.to_string(), v.to_string());
            } else {
                return Err(ConfigError(format!("unrecognized header line: {line}")));
            }
        }
        Ok(RunManifest {
            version: version.ok_or_else(|| ConfigError("missing version line".into()))?,
            subcommand: subcommand.ok_or_else(|| ConfigError("missing subcommand".into()))?,
            seed: seed.ok_or_else(|| ConfigError("missing seed".into()))?,
            digest: digest.ok_or_else(|| ConfigError("missing digest".into()))?,
            config,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo() -> RunManifest {
        let mut config = BTreeMap::new();
        config.insert("alpha".into(), "2".into());
        config.insert("laziness".into(), "0.5".into());
        config.insert("n".into(), "100000".into());
        RunManifest::new("range", 42, config)
    }

    #[test]
    fn header_round_trips() {
        let m = demo();
        let text = format!("{}trial,sample\n0,1.5\n", m.render_header());
        let parsed = RunManifest::parse_csv_header(&text).unwrap();
        assert_eq!(parsed, m);
        assert_eq!(parsed.render_header(), m.render_header());
    }

    #[test]
    fn digest_is_stable_and_config_sensitive() {
        let m = demo();
        assert_eq!(m.digest.len(), 16);
        let mut other = m.config.clone();
        other.insert("n".into(), "200000".into());
        assert_ne!(config_digest(&other), m.digest);
        assert_eq!(config_digest(&m.config), m.digest);
    }

    #[test]
    fn parser_rejects_mangled_headers() {
        assert!(RunManifest::parse_csv_header("# rwrs 0.1.0\n").is_err()); // missing fields
        let m = demo();
        let bad = m.render_header().replace("digest:", "digest-");
        assert!(RunManifest::parse_csv_header(&bad).is_err());
    }
}
