//! Optional `key=value` config files whose keys mirror long flag names.
//! Flags given on the command line win over config entries.

use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parse `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key=value, got `{line}`", n + 1);
        };
        let k = k.trim();
        if k.is_empty() || k.starts_with('-') || k == "config" {
            bail!("config line {}: invalid key `{k}`", n + 1);
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn flag_present(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    let with_eq = format!("--{key}=");
    args.iter().any(|a| *a == flag || a.starts_with(&with_eq))
}

/// Append config entries as flags unless the same flag is already present.
/// Boolean values `true`/`false` become a bare flag or nothing.
pub fn merge_config(args: &[String], path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut merged = args.to_vec();
    for (k, v) in parse_config(&text)? {
        if flag_present(args, &k) {
            continue;
        }
        match v.as_str() {
            "true" => merged.push(format!("--{k}")),
            "false" => {}
            _ => merged.push(format!("--{k}={v}")),
        }
    }
    Ok(merged)
}
