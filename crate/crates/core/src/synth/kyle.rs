//! Synthetic market with a known linear price impact.
//!
//! Each market order of size `v` and sign `e` moves the mid by
//! `lambda * e * v` cents plus Gaussian noise. The spread and best-level
//! depth are constant, so every order fills in one execution at the best
//! quote.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{BookSnapshot, EventRecord, EventType, MergedStream, Side, StreamMeta, DAY_NANOS};
use crate::preprocess::MarketOrder;
use crate::price::{Mid, UNITS_PER_CENT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KyleWorldConfig {
    /// Impact in cents per share.
    pub lambda: f64,
    /// Order sizes are uniform in `size_min..=size_max` shares.
    pub size_min: u32,
    pub size_max: u32,
    /// Standard deviation of the per-order mid noise, in cents.
    pub noise_sd: f64,
    pub n_mo: usize,
    pub seed: u64,
    /// Starting mid in 1e-4 dollars.
    pub initial_mid: i64,
    /// Constant spread in 1e-4 dollars; must be even.
    pub spread: i64,
    /// Volume at each best quote.
    pub best_volume: u32,
    pub start_ns: i64,
    pub spacing_ns: i64,
}

impl Default for KyleWorldConfig {
    fn default() -> Self {
        KyleWorldConfig {
            lambda: 0.01,
            size_min: 1,
            size_max: 100,
            noise_sd: 1.0,
            n_mo: 50_000,
            seed: 0,
            initial_mid: 10_000_000,
            spread: 100,
            best_volume: 1000,
            start_ns: 37_800_000_000_000,
            spacing_ns: 250_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KyleWorld {
    pub orders: Vec<MarketOrder>,
    pub true_lambda: f64,
    pub config: KyleWorldConfig,
}

/// Draws the order sequence and mid path. Mids are rounded to whole
/// 1e-4 dollar units so both quotes stay on the price grid.
pub fn generate_kyle_world(cfg: &KyleWorldConfig) -> Result<KyleWorld> {
    if !(cfg.lambda.is_finite() && cfg.noise_sd.is_finite() && cfg.noise_sd >= 0.0) {
        return Err(Error::invalid("lambda must be finite and noise_sd non-negative"));
    }
    if cfg.size_min == 0 || cfg.size_min > cfg.size_max {
        return Err(Error::invalid("size range must be non-empty and positive"));
    }
    if cfg.spread <= 0 || cfg.spread % 2 != 0 {
        return Err(Error::invalid("spread must be positive and even"));
    }
    if cfg.best_volume <= cfg.size_max {
        return Err(Error::invalid("best volume must exceed the largest order"));
    }
    if cfg.spacing_ns <= 4 || cfg.start_ns < 0 {
        return Err(Error::invalid("spacing must exceed 4 ns and start must be non-negative"));
    }
    let last = cfg.start_ns as i128 + cfg.spacing_ns as i128 * cfg.n_mo as i128;
    if last >= DAY_NANOS as i128 {
        return Err(Error::invalid("orders do not fit in one day"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = Normal::new(0.0, cfg.noise_sd).map_err(|e| Error::invalid(e.to_string()))?;
    let half = cfg.spread / 2;
    let cent = UNITS_PER_CENT as f64;

    let mut exact = cfg.initial_mid as f64;
    let mut mid = cfg.initial_mid;
    let mut orders = Vec::with_capacity(cfg.n_mo);
    for i in 0..cfg.n_mo {
        let sign = if rng.random::<bool>() { Side::Buy } else { Side::Sell };
        let size = rng.random_range(cfg.size_min..=cfg.size_max);
        let eta = noise.sample(&mut rng);
        exact += (cfg.lambda * sign.sign() as f64 * size as f64 + eta) * cent;
        let next = exact.round() as i64;
        if next - half <= 0 {
            return Err(Error::SimulationHalt {
                time_ns: cfg.start_ns + i as i64 * cfg.spacing_ns,
                msg: "mid-price fell to zero".into(),
            });
        }
        let fill_price = match sign {
            Side::Buy => mid + half,
            Side::Sell => mid - half,
        };
        orders.push(MarketOrder {
            time_ns: cfg.start_ns + i as i64 * cfg.spacing_ns,
            sign,
            total_size: size as u64,
            n_fills: 1,
            contains_hidden: false,
            price_changing: false,
            mid_before: Mid::from_price(mid),
            mid_after_next: Mid::from_price(next),
            spread_before: cfg.spread,
            opposite_best_volume_before: cfg.best_volume as u64,
            notional: fill_price * size as i64,
            first_index: 5 * i,
            pre_book_fallback: false,
            next_mid_fallback: false,
        });
        mid = next;
    }
    Ok(KyleWorld {
        orders,
        true_lambda: cfg.lambda,
        config: cfg.clone(),
    })
}

/// Resting orders on one side of the embedded book.
struct Quotes {
    side: Side,
    orders: Vec<(u64, i64, u32)>,
}

impl Quotes {
    fn best(&self) -> (i64, u64) {
        let best = match self.side {
            Side::Sell => self.orders.iter().map(|o| o.1).min(),
            Side::Buy => self.orders.iter().map(|o| o.1).max(),
        }
        .expect("side never empty");
        let vol = self.orders.iter().filter(|o| o.1 == best).map(|o| o.2 as u64).sum();
        (best, vol)
    }
}

/// Writes a world out as a level-1 LOBSTER event stream.
///
/// Each order becomes one execution against the resting quote followed
/// by a re-quote of both sides around the new mid: the side moving away
/// first, each as a submission of the new quote and deletion of the old.
pub fn embed_kyle_world(world: &KyleWorld, ticker: &str, date: &str) -> MergedStream {
    let cfg = &world.config;
    let half = cfg.spread / 2;
    let vol = cfg.best_volume;
    let mut next_id = 1u64;
    let mid0 = world.orders.first().map(|o| o.mid_before.half_units() / 2).unwrap_or(cfg.initial_mid);

    let mut asks = Quotes {
        side: Side::Sell,
        orders: vec![(next_id, mid0 + half, vol)],
    };
    let mut bids = Quotes {
        side: Side::Buy,
        orders: vec![(next_id + 1, mid0 - half, vol)],
    };
    next_id += 2;

    let snap = |asks: &Quotes, bids: &Quotes| {
        let (ap, av) = asks.best();
        let (bp, bv) = bids.best();
        BookSnapshot::level1(ap, av, bp, bv)
    };
    let initial = snap(&asks, &bids);

    let mut events = Vec::with_capacity(world.orders.len() * 5);
    let mut books = Vec::with_capacity(world.orders.len() * 5);
    for mo in &world.orders {
        let t = mo.time_ns;
        let resting = match mo.sign {
            Side::Buy => &mut asks,
            Side::Sell => &mut bids,
        };
        let o = &mut resting.orders[0];
        o.2 -= mo.total_size as u32;
        events.push(EventRecord {
            time_ns: t,
            order_id: o.0,
            price: o.1,
            size: mo.total_size as u32,
            event_type: EventType::ExecVisible,
            direction: resting.side,
        });
        books.push(snap(&asks, &bids));

        let new_mid = mo.mid_after_next.half_units() / 2;
        let up = mo.mid_after_next >= mo.mid_before;
        let order = if up { [Side::Sell, Side::Buy] } else { [Side::Buy, Side::Sell] };
        let mut dt = 1;
        for side in order {
            let q = match side {
                Side::Sell => &mut asks,
                Side::Buy => &mut bids,
            };
            let price = match side {
                Side::Sell => new_mid + half,
                Side::Buy => new_mid - half,
            };
            let old = q.orders[0];
            q.orders.push((next_id, price, vol));
            events.push(EventRecord {
                time_ns: t + dt,
                order_id: next_id,
                price,
                size: vol,
                event_type: EventType::Submission,
                direction: side,
            });
            books.push(snap(&asks, &bids));
            next_id += 1;
            dt += 1;

            let q = match side {
                Side::Sell => &mut asks,
                Side::Buy => &mut bids,
            };
            q.orders.remove(0);
            events.push(EventRecord {
                time_ns: t + dt,
                order_id: old.0,
                price: old.1,
                size: old.2,
                event_type: EventType::Deletion,
                direction: side,
            });
            books.push(snap(&asks, &bids));
            dt += 1;
        }
    }
    MergedStream::from_parts_unchecked(
        events,
        books,
        Some(initial),
        StreamMeta {
            ticker: ticker.to_string(),
            date: date.to_string(),
            depth: 1,
        },
    )
}
