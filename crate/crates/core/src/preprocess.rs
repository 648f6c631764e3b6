//! Cleaning steps between raw LOBSTER streams and impact estimation:
//! session clipping, market-order reconstruction, outlier filtering and
//! per-day volume normalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{parse_clock, EventType, MergedStream, Side, DAY_NANOS, NANOS_PER_SEC};
use crate::price::Mid;
use crate::stats::mean_std;

/// Half-open intraday window `[start, end)` in nanoseconds after midnight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionWindow {
    start_ns: i64,
    end_ns: i64,
}

impl SessionWindow {
    pub fn new(start_ns: i64, end_ns: i64) -> Result<Self> {
        if !(0 <= start_ns && start_ns < end_ns && end_ns <= DAY_NANOS) {
            return Err(Error::invalid(format!("session window [{start_ns}, {end_ns}) ns is not valid")));
        }
        Ok(SessionWindow { start_ns, end_ns })
    }

    /// Builds a window from `HH:MM[:SS]` strings.
    pub fn from_clock(start: &str, end: &str) -> Result<Self> {
        let s = parse_clock(start).ok_or_else(|| Error::invalid(format!("bad session start {start:?}")))?;
        let e = parse_clock(end).ok_or_else(|| Error::invalid(format!("bad session end {end:?}")))?;
        Self::new(s, e)
    }

    pub fn start_ns(&self) -> i64 {
        self.start_ns
    }

    pub fn end_ns(&self) -> i64 {
        self.end_ns
    }

    pub fn contains(&self, time_ns: i64) -> bool {
        self.start_ns <= time_ns && time_ns < self.end_ns
    }
}

impl Default for SessionWindow {
    /// 10:30 to 15:00, dropping the first and last hour of regular trading.
    fn default() -> Self {
        SessionWindow {
            start_ns: 37_800 * NANOS_PER_SEC,
            end_ns: 54_000 * NANOS_PER_SEC,
        }
    }
}

/// Keeps the events with `start <= time < end`.
pub fn clip_session(stream: MergedStream, window: SessionWindow) -> MergedStream {
    let events = stream.events();
    let lo = events.partition_point(|e| e.time_ns < window.start_ns);
    let hi = lo + events[lo..].partition_point(|e| e.time_ns < window.end_ns);
    let initial = if lo < hi { stream.book_before(lo).cloned() } else { None };
    let (mut events, mut books, _, meta) = stream.into_parts();
    events.truncate(hi);
    events.drain(..lo);
    books.truncate(hi);
    books.drain(..lo);
    MergedStream::from_parts_unchecked(events, books, initial, meta)
}

/// A market order rebuilt from one or more same-timestamp executions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketOrder {
    pub time_ns: i64,
    /// Aggressor side: the opposite of the executed limit orders' side.
    pub sign: Side,
    pub total_size: u64,
    pub n_fills: u32,
    pub contains_hidden: bool,
    pub price_changing: bool,
    pub mid_before: Mid,
    pub mid_after_next: Mid,
    pub spread_before: i64,
    pub opposite_best_volume_before: u64,
    /// Sum of fill price times fill size (1e-4 dollars x shares).
    pub notional: i64,
    /// Index of the first fill in the source stream.
    pub first_index: usize,
    /// No book state preceded the first fill; pre-trade fields were read
    /// from the book after the first fill instead.
    pub pre_book_fallback: bool,
    /// No later market order existed; `mid_after_next` is the mid after
    /// this order's last fill.
    pub next_mid_fallback: bool,
}

impl MarketOrder {
    /// `sign * (mid_after_next - mid_before)` in half-units.
    pub fn signed_move_half_units(&self) -> i64 {
        self.sign.sign() * (self.mid_after_next - self.mid_before)
    }

    pub fn mid_move_half_units(&self) -> i64 {
        self.mid_after_next - self.mid_before
    }

    /// Volume-weighted fill price in 1e-4 dollars.
    pub fn average_price(&self) -> f64 {
        self.notional as f64 / self.total_size as f64
    }
}

/// Groups consecutive executions (types 4 and 5) sharing timestamp and
/// direction into market orders. Cross trades and all other event types
/// break a group and are otherwise ignored.
pub fn reconstruct_market_orders(stream: &MergedStream) -> Vec<MarketOrder> {
    let events = stream.events();
    let books = stream.books();
    let mut out: Vec<MarketOrder> = Vec::new();
    // index of the last fill of each order, for the post-fill fallback mid
    let mut last_fill: Vec<usize> = Vec::new();

    let mut i = 0;
    while i < events.len() {
        let first = events[i];
        if !first.event_type.is_execution() {
            i += 1;
            continue;
        }
        let mut total_size = 0u64;
        let mut notional = 0i64;
        let mut contains_hidden = false;
        let mut j = i;
        while j < events.len() {
            let e = &events[j];
            if !e.event_type.is_execution() || e.time_ns != first.time_ns || e.direction != first.direction {
                break;
            }
            total_size += e.size as u64;
            notional += e.price * e.size as i64;
            contains_hidden |= e.event_type == EventType::ExecHidden;
            j += 1;
        }

        let sign = first.direction.opposite();
        let (pre, pre_book_fallback) = match stream.book_before(i) {
            Some(b) => (b, false),
            None => (&books[i], true),
        };
        let opposite_best_volume_before = match sign {
            Side::Buy => pre.best_ask_volume(),
            Side::Sell => pre.best_bid_volume(),
        };
        out.push(MarketOrder {
            time_ns: first.time_ns,
            sign,
            total_size,
            n_fills: (j - i) as u32,
            contains_hidden,
            price_changing: total_size >= opposite_best_volume_before,
            mid_before: pre.mid(),
            mid_after_next: pre.mid(),
            spread_before: pre.spread(),
            opposite_best_volume_before,
            notional,
            first_index: i,
            pre_book_fallback,
            next_mid_fallback: false,
        });
        last_fill.push(j - 1);
        i = j;
    }

    for k in 0..out.len() {
        if k + 1 < out.len() {
            out[k].mid_after_next = out[k + 1].mid_before;
        } else {
            out[k].mid_after_next = books[last_fill[k]].mid();
            out[k].next_mid_fallback = true;
        }
    }
    out
}

/// Result of [`remove_outliers`].
#[derive(Debug, Clone, PartialEq)]
pub struct Filtered {
    pub kept: Vec<f64>,
    pub removed: usize,
}

/// Keeps samples within `k` population standard deviations of the mean.
pub fn remove_outliers(samples: &[f64], k: f64) -> Result<Filtered> {
    let mask = outlier_mask(samples, k)?;
    let kept: Vec<f64> = samples.iter().zip(&mask).filter(|(_, &m)| m).map(|(&x, _)| x).collect();
    let removed = samples.len() - kept.len();
    Ok(Filtered { kept, removed })
}

/// `true` for samples within `k` population standard deviations of the mean.
pub fn outlier_mask(samples: &[f64], k: f64) -> Result<Vec<bool>> {
    if samples.len() < 2 {
        return Err(Error::insufficient("outlier removal needs at least 2 samples"));
    }
    if !(k >= 0.0) {
        return Err(Error::invalid("outlier threshold must be non-negative"));
    }
    let (mean, sd) = mean_std(samples);
    Ok(samples.iter().map(|x| (x - mean).abs() <= k * sd).collect())
}

/// Mean pre-trade opposite-side best volume over one day's orders.
pub fn daily_mean_best_volume(mos: &[MarketOrder]) -> Option<f64> {
    if mos.is_empty() {
        return None;
    }
    let total: u64 = mos.iter().map(|m| m.opposite_best_volume_before).sum();
    Some(total as f64 / mos.len() as f64)
}

/// A market order with its size divided by the day's mean best volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedOrder {
    pub order: MarketOrder,
    pub normalized_volume: f64,
}

pub fn normalize_volumes(mos: &[MarketOrder], mean_best_volume: f64) -> Result<Vec<NormalizedOrder>> {
    if !(mean_best_volume > 0.0) {
        return Err(Error::invalid("mean best volume must be positive"));
    }
    Ok(mos
        .iter()
        .map(|m| NormalizedOrder {
            order: m.clone(),
            normalized_volume: m.total_size as f64 / mean_best_volume,
        })
        .collect())
}

/// Normalizes each day by its own mean best volume. Days without orders
/// (or with zero mean volume) are skipped with a warning.
pub fn normalize_by_day(days: &[Vec<MarketOrder>]) -> Vec<Vec<NormalizedOrder>> {
    days.iter()
        .enumerate()
        .filter_map(|(d, mos)| match daily_mean_best_volume(mos) {
            Some(v) if v > 0.0 => normalize_volumes(mos, v).ok(),
            _ => {
                log::warn!("day {d}: no market orders, skipped in volume normalization");
                None
            }
        })
        .collect()
}
