//! Streaming parsers for LOBSTER `message` and `orderbook` CSV files.
//!
//! Both readers pull one line at a time from a `BufRead` into a reused
//! buffer and decode fields by hand; no intermediate strings are allocated.

use std::io::BufRead;

use smallvec::SmallVec;

use super::book::{BookSnapshot, Level};
use super::event::{EventRecord, EventType, Side, DAY_NANOS, NANOS_PER_SEC};
use crate::error::{Error, Result};

/// Parses decimal seconds-after-midnight (`43955.2426`) into nanoseconds.
/// Accepts 0 to 9 fractional digits; the conversion is exact.
pub fn parse_time_ns(field: &[u8]) -> Option<i64> {
    let (int_part, frac_part) = match field.iter().position(|&b| b == b'.') {
        Some(dot) => (&field[..dot], &field[dot + 1..]),
        None => (field, &field[field.len()..]),
    };
    if int_part.is_empty() || int_part.len() > 6 || frac_part.len() > 9 {
        return None;
    }
    let secs = parse_digits(int_part)?;
    let mut frac = 0i64;
    for &b in frac_part {
        if !b.is_ascii_digit() {
            return None;
        }
        frac = frac * 10 + (b - b'0') as i64;
    }
    frac *= 10i64.pow(9 - frac_part.len() as u32);
    Some(secs * NANOS_PER_SEC + frac)
}

fn parse_digits(s: &[u8]) -> Option<i64> {
    if s.is_empty() || s.len() > 18 {
        return None;
    }
    let mut v = 0i64;
    for &b in s {
        if !b.is_ascii_digit() {
            return None;
        }
        v = v * 10 + (b - b'0') as i64;
    }
    Some(v)
}

fn parse_int(s: &[u8]) -> Option<i64> {
    match s.first() {
        Some(b'-') => parse_digits(&s[1..]).map(|v| -v),
        Some(b'+') => parse_digits(&s[1..]),
        _ => parse_digits(s),
    }
}

fn trim_line(buf: &[u8]) -> &[u8] {
    let mut end = buf.len();
    while end > 0 && matches!(buf[end - 1], b'\n' | b'\r' | b' ' | b'\t') {
        end -= 1;
    }
    &buf[..end]
}

/// Line-oriented reader shared by both file kinds.
struct Lines<R> {
    reader: R,
    buf: Vec<u8>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(reader: R) -> Self {
        Lines {
            reader,
            buf: Vec::with_capacity(256),
            line: 0,
        }
    }

    /// Next non-blank line, trimmed of its terminator.
    fn next_line(&mut self) -> Option<std::io::Result<(usize, &[u8])>> {
        loop {
            self.buf.clear();
            match self.reader.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {
                    self.line += 1;
                    if !trim_line(&self.buf).is_empty() {
                        break;
                    }
                }
                Err(e) => return Some(Err(e)),
            }
        }
        Some(Ok((self.line, trim_line(&self.buf))))
    }
}

/// Iterator over the rows of a message file.
pub struct MessageReader<R> {
    lines: Lines<R>,
}

impl<R: BufRead> MessageReader<R> {
    pub fn new(reader: R) -> Self {
        MessageReader {
            lines: Lines::new(reader),
        }
    }
}

impl<R: BufRead> Iterator for MessageReader<R> {
    type Item = Result<EventRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        let (line, row) = match self.lines.next_line()? {
            Ok(v) => v,
            Err(e) => return Some(Err(e.into())),
        };
        Some(parse_message_row(row, line))
    }
}

fn parse_message_row(row: &[u8], line: usize) -> Result<EventRecord> {
    let malformed = |msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };
    let rejected = |msg: &str| Error::RejectedRow {
        line,
        msg: msg.to_string(),
    };

    let mut fields: SmallVec<[&[u8]; 6]> = SmallVec::new();
    for f in row.split(|&b| b == b',') {
        if fields.len() == 6 {
            return Err(malformed("expected 6 fields (Time,Type,OrderID,Size,Price,Direction)"));
        }
        fields.push(f);
    }
    if fields.len() != 6 {
        return Err(malformed("expected 6 fields (Time,Type,OrderID,Size,Price,Direction)"));
    }

    let time_ns = parse_time_ns(fields[0]).ok_or_else(|| malformed("bad timestamp"))?;
    let code = parse_int(fields[1]).ok_or_else(|| malformed("bad event type"))?;
    let order_id = parse_int(fields[2]).ok_or_else(|| malformed("bad order id"))?;
    let size = parse_int(fields[3]).ok_or_else(|| malformed("bad size"))?;
    let price = parse_int(fields[4]).ok_or_else(|| malformed("bad price"))?;
    let dir = parse_int(fields[5]).ok_or_else(|| malformed("bad direction"))?;

    let event_type = u8::try_from(code)
        .ok()
        .and_then(EventType::from_code)
        .ok_or_else(|| rejected(&format!("event type {code} not in 1..7")))?;
    let direction = Side::from_sign(dir).ok_or_else(|| rejected(&format!("direction {dir} not in {{1,-1}}")))?;
    if order_id < 0 {
        return Err(rejected("negative order id"));
    }
    if time_ns >= DAY_NANOS {
        return Err(rejected("time beyond end of day"));
    }
    if event_type != EventType::Halt {
        if size <= 0 {
            return Err(rejected("non-positive size"));
        }
        if price <= 0 {
            return Err(rejected("non-positive price"));
        }
    } else if size < 0 {
        return Err(rejected("negative size"));
    }
    let size = u32::try_from(size).map_err(|_| rejected("size out of range"))?;

    let ev = EventRecord {
        time_ns,
        order_id: order_id as u64,
        price,
        size,
        event_type,
        direction,
    };
    if let Some(msg) = ev.check() {
        return Err(rejected(msg));
    }
    Ok(ev)
}

/// Parses a whole message file.
pub fn parse_message_file<R: BufRead>(reader: R) -> Result<Vec<EventRecord>> {
    MessageReader::new(reader).collect()
}

/// Iterator over the rows of an orderbook file with `depth` levels.
pub struct OrderbookReader<R> {
    lines: Lines<R>,
    depth: usize,
    row: usize,
}

impl<R: BufRead> OrderbookReader<R> {
    pub fn new(reader: R, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::invalid("book depth must be positive"));
        }
        Ok(OrderbookReader {
            lines: Lines::new(reader),
            depth,
            row: 0,
        })
    }
}

impl<R: BufRead> Iterator for OrderbookReader<R> {
    type Item = Result<BookSnapshot>;

    fn next(&mut self) -> Option<Self::Item> {
        let depth = self.depth;
        let (line, row) = match self.lines.next_line()? {
            Ok(v) => v,
            Err(e) => return Some(Err(e.into())),
        };
        let idx = self.row;
        self.row += 1;
        Some(parse_orderbook_row(row, line, idx, depth))
    }
}

fn parse_orderbook_row(row: &[u8], line: usize, idx: usize, depth: usize) -> Result<BookSnapshot> {
    let malformed = |msg: String| Error::Parse { line, msg };
    let mut values: SmallVec<[i64; 4]> = SmallVec::new();
    for f in row.split(|&b| b == b',') {
        if values.len() == 4 * depth {
            return Err(malformed(format!("expected {} columns for depth {depth}", 4 * depth)));
        }
        values.push(parse_int(f).ok_or_else(|| malformed("bad number".into()))?);
    }
    if values.len() != 4 * depth {
        return Err(malformed(format!(
            "expected {} columns for depth {depth}, found {}",
            4 * depth,
            values.len()
        )));
    }
    let mut levels: SmallVec<[Level; 1]> = SmallVec::with_capacity(depth);
    for chunk in values.chunks_exact(4) {
        if chunk[1] < 0 || chunk[3] < 0 {
            return Err(malformed("negative volume".into()));
        }
        levels.push(Level {
            ask_price: chunk[0],
            ask_volume: chunk[1] as u64,
            bid_price: chunk[2],
            bid_volume: chunk[3] as u64,
        });
    }
    let book = BookSnapshot::new(levels);
    if let Some(msg) = book.check() {
        return Err(Error::InvalidBook {
            row: idx,
            msg: msg.to_string(),
        });
    }
    Ok(book)
}

/// Parses a whole orderbook file.
pub fn parse_orderbook_file<R: BufRead>(reader: R, depth: usize) -> Result<Vec<BookSnapshot>> {
    OrderbookReader::new(reader, depth)?.collect()
}
