//! LOBSTER message/orderbook ingestion.
//!
//! A LOBSTER day is a pair of CSV files: every message row has a matching
//! orderbook row describing the book immediately after that event. Prices
//! are integers in 1e-4 dollars and timestamps are decimal seconds after
//! midnight, held here as integer nanoseconds.

mod book;
mod emit;
mod event;
mod parse;
mod stream;

pub use book::{BookSnapshot, Level, EMPTY_ASK_PRICE, EMPTY_BID_PRICE};
pub use emit::{format_time, write_message_file, write_message_row, write_orderbook_file, write_orderbook_row};
pub use event::{parse_clock, EventRecord, EventType, Side, DAY_NANOS, NANOS_PER_SEC};
pub use parse::{parse_message_file, parse_orderbook_file, parse_time_ns, MessageReader, OrderbookReader};
pub use stream::{
    load_stream, merge_streams, open_input, validate_stream, MergedStream, StreamMeta, Violation, ViolationKind,
};
