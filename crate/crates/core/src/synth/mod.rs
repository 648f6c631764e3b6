//! Synthetic order-flow generators.

mod kyle;
mod zi;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub use kyle::{embed_kyle_world, generate_kyle_world, KyleWorld, KyleWorldConfig};
pub use zi::{generate_zero_intelligence, ZiConfig};

use crate::error::Result;
use crate::ingest::{write_message_file, write_orderbook_file, MergedStream};

/// Writes `<ticker>_<date>_message.csv` and `<ticker>_<date>_orderbook.csv`
/// into `dir` and returns both paths.
pub fn write_lobster_files(stream: &MergedStream, dir: &Path, decimals: u8) -> Result<(PathBuf, PathBuf)> {
    let meta = stream.meta();
    let stem = format!("{}_{}", meta.ticker, meta.date);
    let message = dir.join(format!("{stem}_message.csv"));
    let orderbook = dir.join(format!("{stem}_orderbook.csv"));
    let mut w = BufWriter::new(File::create(&message)?);
    write_message_file(&mut w, stream.events(), decimals)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(&orderbook)?);
    write_orderbook_file(&mut w, stream.books())?;
    w.flush()?;
    Ok((message, orderbook))
}
