//! Flag defaults from a key-value config file and `LOBIMPACT_*`
//! environment variables.
//!
//! Precedence, lowest first: built-in defaults, config file, environment,
//! command line. File and environment values are spliced into the
//! argument list right after the subcommand, so explicit flags, which
//! come later, override them.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;

use clap::{ArgAction, CommandFactory};

use crate::args::Cli;

const ENV_PREFIX: &str = "LOBIMPACT_";

/// Long flags of one subcommand, keyed by lowercase name, with whether
/// they take a value.
fn flags_of(sub: &clap::Command) -> BTreeMap<String, (String, bool)> {
    sub.get_arguments()
        .filter_map(|a| {
            let long = a.get_long()?;
            let takes_value = !matches!(a.get_action(), ArgAction::SetTrue | ArgAction::SetFalse | ArgAction::Count);
            Some((long.to_ascii_lowercase(), (long.to_string(), takes_value)))
        })
        .collect()
}

fn normalize_key(k: &str) -> String {
    k.trim().to_ascii_lowercase().replace('_', "-")
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("config line {}: expected key = value", i + 1));
        };
        let key = normalize_key(k);
        if key.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(raw: &[OsString]) -> Option<OsString> {
    let mut it = raw.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    std::env::var_os(format!("{ENV_PREFIX}CONFIG"))
}

fn truthy(v: &str) -> Result<bool, String> {
    match v.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(format!("expected a boolean, got '{v}'")),
    }
}

/// Returns `raw` with config-file and environment values inserted after
/// the subcommand name.
pub fn expand_args(raw: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(sub_name) = raw.get(1).map(|s| s.to_string_lossy().into_owned()) else {
        return Ok(raw);
    };
    let cmd = Cli::command();
    let Some(sub) = cmd.find_subcommand(&sub_name) else {
        return Ok(raw);
    };
    let flags = flags_of(sub);
    let all_flags: BTreeMap<String, ()> = cmd
        .get_subcommands()
        .flat_map(|s| flags_of(s).into_keys())
        .map(|k| (k, ()))
        .collect();

    let mut values: BTreeMap<String, String> = BTreeMap::new();
    if let Some(path) = config_path(&raw) {
        let text = std::fs::read_to_string(Path::new(&path))
            .map_err(|e| format!("cannot read config {}: {e}", Path::new(&path).display()))?;
        for (key, value) in parse_config(&text)? {
            if key == "config" {
                continue;
            }
            if !all_flags.contains_key(&key) {
                return Err(format!("config: unknown key '{key}'"));
            }
            if flags.contains_key(&key) {
                values.insert(key, value);
            }
        }
    }
    for (name, value) in std::env::vars() {
        if let Some(rest) = name.strip_prefix(ENV_PREFIX) {
            let key = normalize_key(rest);
            if key != "config" && flags.contains_key(&key) {
                values.insert(key, value);
            }
        }
    }

    let mut injected = Vec::new();
    for (key, value) in values {
        let (long, takes_value) = &flags[&key];
        if *takes_value {
            injected.push(OsString::from(format!("--{long}={value}")));
        } else if truthy(&value).map_err(|e| format!("{key}: {e}"))? {
            injected.push(OsString::from(format!("--{long}")));
        }
    }
    let mut out = Vec::with_capacity(raw.len() + injected.len());
    out.extend_from_slice(&raw[..2]);
    out.extend(injected);
    out.extend_from_slice(&raw[2..]);
    Ok(out)
}
