//! Fixed-point price helpers.
//!
//! Raw prices are integers in units of 1e-4 dollars (LOBSTER convention,
//! `2158800` is $215.88). A mid-price can land on half a unit, so it is
//! stored as the sum of the two quotes.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Sub;

/// Price units (1e-4 dollars) per dollar cent.
pub const UNITS_PER_CENT: i64 = 100;

/// Mid-price held in half-units of 1e-4 dollars, i.e. `ask + bid`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mid(i64);

impl Mid {
    pub fn from_quotes(ask: i64, bid: i64) -> Self {
        Mid(ask + bid)
    }

    /// A mid exactly on an integer price.
    pub fn from_price(price: i64) -> Self {
        Mid(2 * price)
    }

    pub fn from_half_units(half_units: i64) -> Self {
        Mid(half_units)
    }

    pub fn half_units(self) -> i64 {
        self.0
    }

    /// Mid in 1e-4 dollar units (may be a half).
    pub fn units(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn cents(self) -> f64 {
        half_units_to_cents(self.0)
    }
}

impl Sub for Mid {
    /// Difference in half-units.
    type Output = i64;

    fn sub(self, rhs: Mid) -> i64 {
        self.0 - rhs.0
    }
}

impl fmt::Display for Mid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", self.0.div_euclid(2))
        }
    }
}

pub fn half_units_to_cents(half_units: i64) -> f64 {
    half_units as f64 / (2 * UNITS_PER_CENT) as f64
}

pub fn units_to_cents(units: i64) -> f64 {
    units as f64 / UNITS_PER_CENT as f64
}
