use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::price::Mid;

/// Price LOBSTER writes for an unpopulated ask level.
pub const EMPTY_ASK_PRICE: i64 = 9_999_999_999;
/// Price LOBSTER writes for an unpopulated bid level.
pub const EMPTY_BID_PRICE: i64 = -9_999_999_999;

/// One price level of the book: best ask and best bid at that depth.
/// A side with zero volume is unpopulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub ask_price: i64,
    pub ask_volume: u64,
    pub bid_price: i64,
    pub bid_volume: u64,
}

impl Level {
    pub const EMPTY: Level = Level {
        ask_price: EMPTY_ASK_PRICE,
        ask_volume: 0,
        bid_price: EMPTY_BID_PRICE,
        bid_volume: 0,
    };

    pub fn has_ask(&self) -> bool {
        self.ask_volume > 0
    }

    pub fn has_bid(&self) -> bool {
        self.bid_volume > 0
    }
}

/// Book state after one event, level 1 first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookSnapshot {
    levels: SmallVec<[Level; 1]>,
}

impl BookSnapshot {
    pub fn new(levels: impl IntoIterator<Item = Level>) -> Self {
        BookSnapshot {
            levels: levels.into_iter().collect(),
        }
    }

    pub fn level1(ask_price: i64, ask_volume: u64, bid_price: i64, bid_volume: u64) -> Self {
        Self::new([Level {
            ask_price,
            ask_volume,
            bid_price,
            bid_volume,
        }])
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    fn top(&self) -> Level {
        self.levels.first().copied().unwrap_or(Level::EMPTY)
    }

    pub fn best_ask(&self) -> i64 {
        self.top().ask_price
    }

    pub fn best_bid(&self) -> i64 {
        self.top().bid_price
    }

    pub fn best_ask_volume(&self) -> u64 {
        self.top().ask_volume
    }

    pub fn best_bid_volume(&self) -> u64 {
        self.top().bid_volume
    }

    pub fn spread(&self) -> i64 {
        self.best_ask() - self.best_bid()
    }

    pub fn mid(&self) -> Mid {
        Mid::from_quotes(self.best_ask(), self.best_bid())
    }

    /// First invariant violation, if any.
    pub fn check(&self) -> Option<&'static str> {
        let top = self.top();
        if !top.has_ask() || !top.has_bid() {
            return Some("empty best quote");
        }
        if top.ask_price <= top.bid_price {
            return Some("crossed book");
        }
        let mut prev = top;
        let mut asks_done = false;
        let mut bids_done = false;
        for level in &self.levels[1..] {
            if level.has_ask() {
                if asks_done || level.ask_price <= prev.ask_price {
                    return Some("ask prices not strictly increasing");
                }
            } else {
                asks_done = true;
            }
            if level.has_bid() {
                if bids_done || level.bid_price >= prev.bid_price {
                    return Some("bid prices not strictly decreasing");
                }
            } else {
                bids_done = true;
            }
            prev = *level;
        }
        None
    }
}
