//! `--config` files: TOML tables whose keys mirror the long flags.
//!
//! Config values are spliced into the argument list right after the subcommand, and
//! only for flags not given on the command line, so explicit flags always win.

use anyhow::{bail, Context, Result};
use std::path::Path;

/// Find `--config PATH` or `--config=PATH` in raw arguments.
pub fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn flag_present(args: &[String], flag: &str) -> bool {
    args.iter().any(|a| a == flag || a.strip_prefix(flag).is_some_and(|r| r.starts_with('=')))
}

fn render(key: &str, v: &toml::Value) -> Result<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(x) => x.to_string(),
        toml::Value::Array(items) => {
            items.iter().map(|x| render(key, x)).collect::<Result<Vec<_>>>()?.join(",")
        }
        _ => bail!("config key {key:?}: unsupported value {v}"),
    })
}

/// Flags from a parsed config table, skipping those already in `args`.
pub fn config_flags(table: &toml::Table, args: &[String]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (key, value) in table {
        if key == "config" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        if flag_present(args, &flag) {
            continue;
        }
        match value {
            toml::Value::Boolean(true) => out.push(flag),
            toml::Value::Boolean(false) => {}
            v => {
                out.push(flag);
                out.push(render(key, v)?);
            }
        }
    }
    Ok(out)
}

/// The argument list with config values merged in.
pub fn merge_args(args: Vec<String>, subcommands: &[&str]) -> Result<Vec<String>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path)).with_context(|| format!("reading config {path}"))?;
    let table: toml::Table = toml::from_str(&text).with_context(|| format!("parsing config {path}"))?;
    let extra = config_flags(&table, &args)?;
    let at = args.iter().position(|a| subcommands.contains(&a.as_str())).map_or(args.len(), |i| i + 1);
    let mut merged = args[..at].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[at..]);
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn explicit_flags_win() {
        let table: toml::Table = toml::from_str("nu = 2.0\nseed = 5\nedges = [0, 4]\nfinite = true\nexact = false").unwrap();
        let args = strings(&["nuqg", "rmt-curve", "--nu", "1"]);
        let flags = config_flags(&table, &args).unwrap();
        assert!(!flags.contains(&"2".to_string()));
        assert!(flags.windows(2).any(|w| w[0] == "--seed" && w[1] == "5"));
        assert!(flags.windows(2).any(|w| w[0] == "--edges" && w[1] == "0,4"));
        assert!(flags.contains(&"--finite".to_string()));
        assert!(!flags.contains(&"--exact".to_string()));
    }

    #[test]
    fn finds_config_path() {
        assert_eq!(config_path(&strings(&["x", "--config", "a.toml"])).as_deref(), Some("a.toml"));
        assert_eq!(config_path(&strings(&["x", "--config=b.toml"])).as_deref(), Some("b.toml"));
        assert_eq!(config_path(&strings(&["x"])), None);
    }
}
