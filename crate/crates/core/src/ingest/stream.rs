use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};

use super::book::BookSnapshot;
use super::event::EventRecord;
use super::parse::{MessageReader, OrderbookReader};
use crate::error::{Error, Result};

/// Where a stream came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamMeta {
    pub ticker: String,
    pub date: String,
    pub depth: usize,
}

/// Message events aligned 1:1 with the book state after each event.
///
/// `initial_book`, when known, is the book state before the first event;
/// session clipping fills it in so that the first retained event still has
/// a preceding quote.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedStream {
    events: Vec<EventRecord>,
    books: Vec<BookSnapshot>,
    initial_book: Option<BookSnapshot>,
    meta: StreamMeta,
}

impl MergedStream {
    /// Builds a stream without any checks. Use [`merge_streams`] for input
    /// data; this exists for tests and for generators that already uphold
    /// the invariants.
    pub fn from_parts_unchecked(
        events: Vec<EventRecord>,
        books: Vec<BookSnapshot>,
        initial_book: Option<BookSnapshot>,
        meta: StreamMeta,
    ) -> Self {
        assert_eq!(events.len(), books.len(), "events and books must align");
        MergedStream {
            events,
            books,
            initial_book,
            meta,
        }
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    pub fn books(&self) -> &[BookSnapshot] {
        &self.books
    }

    pub fn initial_book(&self) -> Option<&BookSnapshot> {
        self.initial_book.as_ref()
    }

    pub fn meta(&self) -> &StreamMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Book state immediately before event `i`.
    pub fn book_before(&self, i: usize) -> Option<&BookSnapshot> {
        if i == 0 {
            self.initial_book.as_ref()
        } else {
            self.books.get(i - 1)
        }
    }

    pub fn into_parts(self) -> (Vec<EventRecord>, Vec<BookSnapshot>, Option<BookSnapshot>, StreamMeta) {
        (self.events, self.books, self.initial_book, self.meta)
    }
}

/// Aligns parsed events with parsed snapshots.
pub fn merge_streams(events: Vec<EventRecord>, books: Vec<BookSnapshot>, meta: StreamMeta) -> Result<MergedStream> {
    if events.len() != books.len() {
        return Err(Error::LengthMismatch {
            events: events.len(),
            snapshots: books.len(),
        });
    }
    if events.is_empty() {
        return Err(Error::insufficient("cannot merge empty streams"));
    }
    for (i, w) in events.windows(2).enumerate() {
        if w[1].time_ns < w[0].time_ns {
            return Err(Error::TimeRegression {
                index: i + 1,
                prev_ns: w[0].time_ns,
                time_ns: w[1].time_ns,
            });
        }
    }
    Ok(MergedStream {
        events,
        books,
        initial_book: None,
        meta,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    CrossedBook,
    EmptyBestQuote,
    LevelOrder,
    NonMonotoneTime,
    BadEvent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub kind: ViolationKind,
    pub detail: String,
}

/// Lists every invariant violation in the stream. Never fails.
pub fn validate_stream(stream: &MergedStream) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut prev_time = None;
    for (i, (ev, book)) in stream.events.iter().zip(&stream.books).enumerate() {
        if let Some(msg) = ev.check() {
            out.push(Violation {
                index: i,
                kind: ViolationKind::BadEvent,
                detail: msg.to_string(),
            });
        }
        if let Some(p) = prev_time {
            if ev.time_ns < p {
                out.push(Violation {
                    index: i,
                    kind: ViolationKind::NonMonotoneTime,
                    detail: "non-monotone time".to_string(),
                });
            }
        }
        prev_time = Some(ev.time_ns);
        if let Some(msg) = book.check() {
            let kind = match msg {
                "crossed book" => ViolationKind::CrossedBook,
                "empty best quote" => ViolationKind::EmptyBestQuote,
                _ => ViolationKind::LevelOrder,
            };
            out.push(Violation {
                index: i,
                kind,
                detail: msg.to_string(),
            });
        }
    }
    out
}

/// Opens a file for buffered reading, transparently decompressing `.gz`.
/// The path `-` reads standard input.
pub fn open_input(path: &Path) -> io::Result<Box<dyn BufRead>> {
    let raw: Box<dyn Read> = if path.as_os_str() == "-" {
        Box::new(io::stdin())
    } else {
        Box::new(File::open(path)?)
    };
    let gz = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"));
    Ok(if gz {
        Box::new(BufReader::with_capacity(1 << 16, MultiGzDecoder::new(raw)))
    } else {
        Box::new(BufReader::with_capacity(1 << 16, raw))
    })
}

/// Parses and merges a message/orderbook file pair.
pub fn load_stream(message: &Path, orderbook: &Path, meta: StreamMeta) -> Result<MergedStream> {
    let mut events = Vec::new();
    for ev in MessageReader::new(open_input(message)?) {
        events.push(ev?);
    }
    let mut books = Vec::with_capacity(events.len());
    for b in OrderbookReader::new(open_input(orderbook)?, meta.depth.max(1))? {
        books.push(b?);
    }
    events.shrink_to_fit();
    books.shrink_to_fit();
    merge_streams(events, books, meta)
}
