//! Zero-intelligence order-flow simulator.
//!
//! Limit orders, market orders and cancellations arrive as independent
//! Poisson streams with constant rates. Limit orders are placed uniformly
//! within a band of ticks behind the opposite best quote, so they never
//! cross. Market orders match the opposite side with price-time priority.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{BookSnapshot, EventRecord, EventType, Level, MergedStream, Side, StreamMeta, NANOS_PER_SEC};
use crate::preprocess::SessionWindow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZiConfig {
    /// Limit-order submissions per second.
    pub lo_rate: f64,
    /// Market orders per second.
    pub mo_rate: f64,
    /// Cancellations per second.
    pub cancel_rate: f64,
    /// Tick size in 1e-4 dollars.
    pub tick: i64,
    /// Shares per lot.
    pub lot: u32,
    /// Starting mid-price in 1e-4 dollars; rounded down to the tick grid.
    pub initial_mid: i64,
    /// Levels written per orderbook row.
    pub depth: usize,
    pub session: SessionWindow,
    /// Limit orders land uniformly 1..=band_ticks ticks behind the
    /// opposite best quote.
    pub band_ticks: u32,
    /// Price levels seeded on each side before the first event.
    pub initial_levels: u32,
    /// Limit-order sizes are uniform in 1..=max_lo_lots lots.
    pub max_lo_lots: u32,
    /// Market-order size in lots.
    pub mo_lots: u32,
    pub seed: u64,
    pub ticker: String,
    pub date: String,
}

impl Default for ZiConfig {
    fn default() -> Self {
        ZiConfig {
            lo_rate: 1.0,
            mo_rate: 0.2,
            cancel_rate: 0.5,
            tick: 100,
            lot: 100,
            initial_mid: 1_000_000,
            depth: 1,
            session: SessionWindow::default(),
            band_ticks: 20,
            initial_levels: 10,
            max_lo_lots: 5,
            mo_lots: 1,
            seed: 0,
            ticker: "ZISIM".to_string(),
            date: "2015-01-02".to_string(),
        }
    }
}

impl ZiConfig {
    fn validate(&self) -> Result<()> {
        let rates = [self.lo_rate, self.mo_rate, self.cancel_rate];
        if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) || rates.iter().sum::<f64>() <= 0.0 {
            return Err(Error::invalid("rates must be non-negative with a positive total"));
        }
        if self.tick <= 0 || self.lot == 0 || self.max_lo_lots == 0 || self.mo_lots == 0 {
            return Err(Error::invalid("tick, lot and order sizes must be positive"));
        }
        if self.depth == 0 || self.band_ticks == 0 || self.initial_levels == 0 {
            return Err(Error::invalid("depth, band and initial levels must be positive"));
        }
        let mid = self.initial_mid - self.initial_mid.rem_euclid(self.tick);
        if mid - self.tick * self.initial_levels as i64 <= 0 {
            return Err(Error::invalid("initial mid too low for the seeded levels"));
        }
        Ok(())
    }
}

#[derive(Debug, Default)]
struct PriceLevel {
    /// FIFO of order ids; may hold ids already cancelled.
    queue: VecDeque<u64>,
    volume: u64,
}

#[derive(Debug, Clone, Copy)]
struct Resting {
    side: Side,
    price: i64,
    remaining: u32,
}

#[derive(Debug, Default)]
struct Book {
    bids: BTreeMap<i64, PriceLevel>,
    asks: BTreeMap<i64, PriceLevel>,
    orders: HashMap<u64, Resting>,
    live: Vec<u64>,
    live_pos: HashMap<u64, usize>,
}

impl Book {
    fn side(&mut self, side: Side) -> &mut BTreeMap<i64, PriceLevel> {
        match side {
            Side::Buy => &mut self.bids,
            Side::Sell => &mut self.asks,
        }
    }

    fn best(&self, side: Side) -> Option<i64> {
        match side {
            Side::Buy => self.bids.keys().next_back().copied(),
            Side::Sell => self.asks.keys().next().copied(),
        }
    }

    fn add(&mut self, id: u64, side: Side, price: i64, size: u32) {
        let level = self.side(side).entry(price).or_default();
        level.queue.push_back(id);
        level.volume += size as u64;
        self.orders.insert(
            id,
            Resting {
                side,
                price,
                remaining: size,
            },
        );
        self.live_pos.insert(id, self.live.len());
        self.live.push(id);
    }

    fn forget(&mut self, id: u64) {
        self.orders.remove(&id);
        if let Some(pos) = self.live_pos.remove(&id) {
            self.live.swap_remove(pos);
            if let Some(&moved) = self.live.get(pos) {
                self.live_pos.insert(moved, pos);
            }
        }
    }

    /// Removes `amount` shares from a resting order.
    fn reduce(&mut self, id: u64, amount: u32) {
        let r = self.orders.get_mut(&id).expect("live order");
        r.remaining -= amount;
        let (side, price, done) = (r.side, r.price, r.remaining == 0);
        let levels = self.side(side);
        let level = levels.get_mut(&price).expect("level of live order");
        level.volume -= amount as u64;
        if level.volume == 0 {
            levels.remove(&price);
        }
        if done {
            self.forget(id);
        }
    }

    /// Oldest live order at the best price of `side`.
    fn front(&mut self, side: Side) -> Option<(u64, Resting)> {
        let price = self.best(side)?;
        let orders = &self.orders;
        let level = match side {
            Side::Buy => self.bids.get_mut(&price)?,
            Side::Sell => self.asks.get_mut(&price)?,
        };
        while let Some(&id) = level.queue.front() {
            if let Some(r) = orders.get(&id) {
                return Some((id, *r));
            }
            level.queue.pop_front();
        }
        None
    }

    fn snapshot(&self, depth: usize) -> BookSnapshot {
        let mut asks = self.asks.iter();
        let mut bids = self.bids.iter().rev();
        BookSnapshot::new((0..depth).map(|_| {
            let mut l = Level::EMPTY;
            if let Some((&p, lv)) = asks.next() {
                l.ask_price = p;
                l.ask_volume = lv.volume;
            }
            if let Some((&p, lv)) = bids.next() {
                l.bid_price = p;
                l.bid_volume = lv.volume;
            }
            l
        }))
    }
}

/// Runs the simulator over the configured session.
pub fn generate_zero_intelligence(cfg: &ZiConfig) -> Result<MergedStream> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut book = Book::default();
    let mut next_id = 1u64;
    let lot = cfg.lot;

    let mid = cfg.initial_mid - cfg.initial_mid.rem_euclid(cfg.tick);
    for k in 1..=cfg.initial_levels as i64 {
        for side in [Side::Sell, Side::Buy] {
            let price = match side {
                Side::Sell => mid + k * cfg.tick,
                Side::Buy => mid - k * cfg.tick,
            };
            let size = rng.random_range(1..=cfg.max_lo_lots) * lot;
            book.add(next_id, side, price, size);
            next_id += 1;
        }
    }
    let initial_book = book.snapshot(cfg.depth);

    let total_rate = cfg.lo_rate + cfg.mo_rate + cfg.cancel_rate;
    let mut events = Vec::new();
    let mut books = Vec::new();
    let mut t = cfg.session.start_ns();

    let halt = |t: i64, msg: &str| Error::SimulationHalt {
        time_ns: t,
        msg: msg.to_string(),
    };

    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        t += (-u.ln() / total_rate * NANOS_PER_SEC as f64).round() as i64;
        if t >= cfg.session.end_ns() {
            break;
        }
        let pick = rng.random::<f64>() * total_rate;
        if pick < cfg.lo_rate {
            let side = if rng.random::<bool>() { Side::Buy } else { Side::Sell };
            let k = rng.random_range(1..=cfg.band_ticks) as i64;
            let price = match side {
                Side::Buy => book.best(Side::Sell).ok_or_else(|| halt(t, "ask side empty"))? - k * cfg.tick,
                Side::Sell => book.best(Side::Buy).ok_or_else(|| halt(t, "bid side empty"))? + k * cfg.tick,
            };
            if price <= 0 {
                continue;
            }
            let size = rng.random_range(1..=cfg.max_lo_lots) * lot;
            book.add(next_id, side, price, size);
            events.push(EventRecord {
                time_ns: t,
                order_id: next_id,
                price,
                size,
                event_type: EventType::Submission,
                direction: side,
            });
            books.push(book.snapshot(cfg.depth));
            next_id += 1;
        } else if pick < cfg.lo_rate + cfg.mo_rate {
            let aggressor = if rng.random::<bool>() { Side::Buy } else { Side::Sell };
            let resting_side = aggressor.opposite();
            let mut remaining = cfg.mo_lots * lot;
            while remaining > 0 {
                let (id, r) = book.front(resting_side).ok_or_else(|| halt(t, "market order exhausted the book"))?;
                let fill = remaining.min(r.remaining);
                book.reduce(id, fill);
                remaining -= fill;
                events.push(EventRecord {
                    time_ns: t,
                    order_id: id,
                    price: r.price,
                    size: fill,
                    event_type: EventType::ExecVisible,
                    direction: resting_side,
                });
                books.push(book.snapshot(cfg.depth));
            }
            if book.best(resting_side).is_none() {
                return Err(halt(t, "book emptied on one side"));
            }
        } else {
            if book.live.is_empty() {
                continue;
            }
            let id = book.live[rng.random_range(0..book.live.len())];
            let r = book.orders[&id];
            let partial = r.remaining > lot && rng.random::<bool>();
            let (amount, kind) = if partial {
                (lot, EventType::Cancellation)
            } else {
                (r.remaining, EventType::Deletion)
            };
            book.reduce(id, amount);
            events.push(EventRecord {
                time_ns: t,
                order_id: id,
                price: r.price,
                size: amount,
                event_type: kind,
                direction: r.side,
            });
            books.push(book.snapshot(cfg.depth));
            if book.best(r.side).is_none() {
                return Err(halt(t, "book emptied on one side"));
            }
        }
    }

    Ok(MergedStream::from_parts_unchecked(
        events,
        books,
        Some(initial_book),
        StreamMeta {
            ticker: cfg.ticker.clone(),
            date: cfg.date.clone(),
            depth: cfg.depth,
        },
    ))
}
