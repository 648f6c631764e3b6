use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::Inputs;

/// One trading day: a message file and its orderbook file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DayFiles {
    pub ticker: String,
    pub date: String,
    pub message: PathBuf,
    pub orderbook: PathBuf,
    pub depth: usize,
}

/// Input discovery found nothing to process.
#[derive(Debug)]
pub struct NoInputs;

impl std::fmt::Display for NoInputs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("no input files matched")
    }
}

impl std::error::Error for NoInputs {}

fn is_message_name(name: &str) -> bool {
    name.contains("_message") && (name.ends_with(".csv") || name.ends_with(".csv.gz"))
}

/// `TICKER_DATE_..._message[_N].csv[.gz]` → orderbook name, ticker, date
/// and the depth suffix if present.
fn describe(name: &str) -> Option<(String, String, String, Option<usize>)> {
    let at = name.rfind("_message")?;
    let orderbook = format!("{}_orderbook{}", &name[..at], &name[at + "_message".len()..]);
    let mut parts = name[..at].split('_');
    let ticker = parts.next()?.to_string();
    let date = parts.next().unwrap_or("").to_string();
    let tail = name[at + "_message".len()..].trim_end_matches(".gz").trim_end_matches(".csv");
    let depth = tail.strip_prefix('_').and_then(|d| d.parse().ok());
    Some((orderbook, ticker, date, depth))
}

fn day_for(message: &Path, default_depth: usize) -> Result<DayFiles> {
    let name = message
        .file_name()
        .and_then(|n| n.to_str())
        .with_context(|| format!("unusable file name {}", message.display()))?;
    let (ob_name, ticker, date, depth) =
        describe(name).with_context(|| format!("{} is not a message file", message.display()))?;
    let orderbook = message.with_file_name(ob_name);
    if !orderbook.is_file() {
        bail!("missing orderbook file {}", orderbook.display());
    }
    Ok(DayFiles {
        ticker,
        date,
        message: message.to_path_buf(),
        orderbook,
        depth: depth.unwrap_or(default_depth),
    })
}

/// Expands directories and message-file paths into day pairs, sorted by
/// ticker and date, after the ticker and date filters.
pub fn discover(inputs: &Inputs) -> Result<Vec<DayFiles>> {
    let mut days = Vec::new();
    for input in &inputs.inputs {
        if input.is_dir() {
            let mut names: Vec<PathBuf> = std::fs::read_dir(input)
                .with_context(|| format!("cannot read directory {}", input.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && p.file_name().and_then(|n| n.to_str()).is_some_and(is_message_name))
                .collect();
            names.sort();
            for p in names {
                days.push(day_for(&p, inputs.depth)?);
            }
        } else if input.is_file() {
            days.push(day_for(input, inputs.depth)?);
        } else {
            bail!("input not found: {}", input.display());
        }
    }
    days.retain(|d| {
        inputs.ticker.as_ref().is_none_or(|t| &d.ticker == t)
            && inputs.date_from.as_ref().is_none_or(|f| d.date.as_str() >= f.as_str())
            && inputs.date_to.as_ref().is_none_or(|t| d.date.as_str() <= t.as_str())
    });
    days.sort();
    days.dedup();
    if days.is_empty() {
        return Err(NoInputs.into());
    }
    Ok(days)
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

pub fn digest_file(path: &Path) -> Result<InputDigest> {
    let mut f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut bytes = 0u64;
    loop {
        let n = f.read(&mut buf).with_context(|| format!("cannot read {}", path.display()))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        bytes += n as u64;
    }
    Ok(InputDigest {
        path: path.display().to_string(),
        bytes,
        sha256: hex::encode(hasher.finalize()),
    })
}

pub fn digest_days(days: &[DayFiles]) -> Result<Vec<InputDigest>> {
    days.iter()
        .flat_map(|d| [&d.message, &d.orderbook])
        .map(|p| digest_file(p))
        .collect()
}
