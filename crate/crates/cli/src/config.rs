//! Flat key-value config files: one `key = value` per line, `#` comments,
//! last assignment wins. Flags override file entries, file entries override
//! defaults.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

fn valid_value(value: &str) -> bool {
    !value.is_empty() && value.chars().all(|c| !c.is_control())
}

/// Parse the flat key-value format. Returns the assignments in key order.
pub fn parse_config_str(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if !valid_key(key) {
            return Err(ConfigError(format!("line {}: bad key {key:?}", lineno + 1)));
        }
        if !valid_value(value) {
            return Err(ConfigError(format!(
                "line {}: bad value for {key:?}",
                lineno + 1
            )));
        }
        map.insert(key.to_string(), value.to_string());
    }
    Ok(map)
}

/// Canonical rendering: sorted `key = value` lines. `parse(render(m)) == m`.
pub fn render_config(map: &BTreeMap<String, String>) -> String {
    let mut out = String::new();
    for (k, v) in map {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(v);
        out.push('\n');
    }
    out
}
