//! Writers producing LOBSTER-layout CSV.

use std::io::{self, Write};

use super::book::BookSnapshot;
use super::event::{EventRecord, NANOS_PER_SEC};

/// Formats nanoseconds after midnight as decimal seconds with exactly
/// `decimals` fractional digits (0..=9). Extra precision is truncated.
pub fn format_time(time_ns: i64, decimals: u8) -> String {
    let decimals = decimals.min(9) as u32;
    let secs = time_ns.div_euclid(NANOS_PER_SEC);
    let frac = time_ns.rem_euclid(NANOS_PER_SEC) / 10i64.pow(9 - decimals);
    if decimals == 0 {
        format!("{secs}")
    } else {
        format!("{secs}.{frac:0width$}", width = decimals as usize)
    }
}

pub fn write_message_row<W: Write>(w: &mut W, ev: &EventRecord, decimals: u8) -> io::Result<()> {
    writeln!(
        w,
        "{},{},{},{},{},{}",
        format_time(ev.time_ns, decimals),
        ev.event_type.code(),
        ev.order_id,
        ev.size,
        ev.price,
        ev.direction.sign()
    )
}

pub fn write_message_file<W: Write>(w: &mut W, events: &[EventRecord], decimals: u8) -> io::Result<()> {
    for ev in events {
        write_message_row(w, ev, decimals)?;
    }
    Ok(())
}

pub fn write_orderbook_row<W: Write>(w: &mut W, book: &BookSnapshot) -> io::Result<()> {
    for (i, l) in book.levels().iter().enumerate() {
        if i > 0 {
            w.write_all(b",")?;
        }
        write!(w, "{},{},{},{}", l.ask_price, l.ask_volume, l.bid_price, l.bid_volume)?;
    }
    w.write_all(b"\n")
}

pub fn write_orderbook_file<W: Write>(w: &mut W, books: &[BookSnapshot]) -> io::Result<()> {
    for b in books {
        write_orderbook_row(w, b)?;
    }
    Ok(())
}
