#![allow(dead_code)]

use std::path::PathBuf;

use lobimpact::bars::Trade;
use lobimpact::ingest::{load_stream, MergedStream, Side, StreamMeta};
use lobimpact::preprocess::MarketOrder;
use lobimpact::Mid;
use rand::Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn load_fixture(ticker: &str) -> MergedStream {
    let dir = fixture_dir();
    let date = "2012-06-21";
    load_stream(
        &dir.join(format!("{ticker}_{date}_message.csv")),
        &dir.join(format!("{ticker}_{date}_orderbook.csv")),
        StreamMeta {
            ticker: ticker.to_string(),
            date: date.to_string(),
            depth: 1,
        },
    )
    .expect("fixture loads")
}

/// Market orders on a random mid path. Consecutive orders chain: each
/// order's post-move mid is the next order's pre-trade mid.
pub fn random_orders<R: Rng>(rng: &mut R, n: usize) -> Vec<MarketOrder> {
    let mut mid = 2 * 1_000_000i64 + rng.random_range(-5000..5000);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let step = match rng.random_range(0..4) {
            0 => 0,
            1 => rng.random_range(-3..=3) * 100,
            _ => rng.random_range(-2000..=2000),
        };
        let next = mid + step;
        let spread = rng.random_range(1..=40) * 100;
        let size = rng.random_range(1..=2000u64);
        let best = rng.random_range(1..=3000u64);
        out.push(MarketOrder {
            time_ns: 36_000_000_000_000 + i as i64 * 1_000_000,
            sign: if rng.random::<bool>() { Side::Buy } else { Side::Sell },
            total_size: size,
            n_fills: 1,
            contains_hidden: false,
            price_changing: size >= best,
            mid_before: Mid::from_half_units(mid),
            mid_after_next: Mid::from_half_units(next),
            spread_before: spread,
            opposite_best_volume_before: best,
            notional: (mid / 2) * size as i64,
            first_index: i,
            pre_book_fallback: false,
            next_mid_fallback: i + 1 == n,
        });
        mid = next;
    }
    out
}

pub fn random_trades<R: Rng>(rng: &mut R, n: usize) -> Vec<Trade> {
    let mut t = 36_000_000_000_000i64;
    let mut mid = 2_000_000i64;
    (0..n)
        .map(|_| {
            t += rng.random_range(0..3_000_000_000);
            mid += rng.random_range(-2..=2) * 100;
            let size = rng.random_range(1..=500u64);
            let price = mid / 2 + rng.random_range(-1..=1) * 50;
            Trade {
                time_ns: t,
                size,
                notional: price * size as i64,
                mid: Mid::from_half_units(mid),
            }
        })
        .collect()
}
