//! Time, tick, volume and dollar bars over a trade sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::MergedStream;
use crate::preprocess::MarketOrder;
use crate::price::Mid;

/// One trade as seen by the bar sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trade {
    pub time_ns: i64,
    pub size: u64,
    /// Price times size, 1e-4 dollars x shares.
    pub notional: i64,
    /// Prevailing mid-price attached to the trade.
    pub mid: Mid,
}

impl Trade {
    pub fn price(&self) -> f64 {
        self.notional as f64 / self.size as f64
    }
}

/// Every execution row of the stream, with the mid after the fill.
pub fn trades_from_stream(stream: &MergedStream) -> Vec<Trade> {
    stream
        .events()
        .iter()
        .zip(stream.books())
        .filter(|(e, _)| e.event_type.is_execution())
        .map(|(e, b)| Trade {
            time_ns: e.time_ns,
            size: e.size as u64,
            notional: e.price * e.size as i64,
            mid: b.mid(),
        })
        .collect()
}

/// One trade per market order, with the pre-trade mid.
pub fn trades_from_orders(mos: &[MarketOrder]) -> Vec<Trade> {
    mos.iter()
        .map(|m| Trade {
            time_ns: m.time_ns,
            size: m.total_size,
            notional: m.notional,
            mid: m.mid_before,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BarKind {
    /// Fixed wall-clock buckets of this many nanoseconds.
    Time(i64),
    /// Close after this many trades.
    Tick(u64),
    /// Close once cumulative shares reach this amount.
    Volume(u64),
    /// Close once cumulative notional (1e-4 dollars x shares) reaches this.
    Dollar(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub start_time: i64,
    pub end_time: i64,
    pub open: Mid,
    pub high: Mid,
    pub low: Mid,
    pub close: Mid,
    pub traded_volume: u64,
    pub traded_dollar: i64,
    pub n_events: usize,
    pub vwap: f64,
    /// Trailing bar that never reached its threshold.
    pub partial: bool,
}

impl Bar {
    fn open_with(t: &Trade) -> Self {
        Bar {
            start_time: t.time_ns,
            end_time: t.time_ns,
            open: t.mid,
            high: t.mid,
            low: t.mid,
            close: t.mid,
            traded_volume: t.size,
            traded_dollar: t.notional,
            n_events: 1,
            vwap: 0.0,
            partial: false,
        }
    }

    fn add(&mut self, t: &Trade) {
        self.end_time = t.time_ns;
        self.high = self.high.max(t.mid);
        self.low = self.low.min(t.mid);
        self.close = t.mid;
        self.traded_volume += t.size;
        self.traded_dollar += t.notional;
        self.n_events += 1;
    }

    fn seal(mut self, partial: bool) -> Self {
        self.vwap = self.traded_dollar as f64 / self.traded_volume as f64;
        self.partial = partial;
        self
    }
}

/// Aggregates trades into bars. A threshold-crossing trade closes the bar
/// it belongs to, and the running counter restarts at zero.
pub fn sample_bars(trades: &[Trade], kind: BarKind) -> Result<Vec<Bar>> {
    let positive = match kind {
        BarKind::Time(d) | BarKind::Dollar(d) => d > 0,
        BarKind::Tick(n) | BarKind::Volume(n) => n > 0,
    };
    if !positive {
        return Err(Error::invalid("bar threshold must be positive"));
    }

    let mut bars = Vec::new();
    let mut current: Option<Bar> = None;
    let mut bucket = i64::MIN;

    for t in trades {
        if let BarKind::Time(width) = kind {
            let b = t.time_ns.div_euclid(width);
            if b != bucket {
                if let Some(bar) = current.take() {
                    bars.push(bar.seal(false));
                }
                bucket = b;
            }
        }
        match current.as_mut() {
            Some(bar) => bar.add(t),
            None => current = Some(Bar::open_with(t)),
        }
        let bar = current.as_ref().expect("bar just opened");
        let full = match kind {
            BarKind::Time(_) => false,
            BarKind::Tick(n) => bar.n_events as u64 >= n,
            BarKind::Volume(v) => bar.traded_volume >= v,
            BarKind::Dollar(d) => bar.traded_dollar >= d,
        };
        if full {
            bars.push(current.take().expect("bar present").seal(false));
        }
    }
    if let Some(bar) = current {
        bars.push(bar.seal(!matches!(kind, BarKind::Time(_))));
    }
    Ok(bars)
}
