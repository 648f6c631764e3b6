use serde::{Deserialize, Serialize};

/// Nanoseconds in one second.
pub const NANOS_PER_SEC: i64 = 1_000_000_000;
/// Exclusive upper bound on event time: one day, in nanoseconds.
pub const DAY_NANOS: i64 = 86_400 * NANOS_PER_SEC;

/// LOBSTER event type codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum EventType {
    Submission = 1,
    Cancellation = 2,
    Deletion = 3,
    ExecVisible = 4,
    ExecHidden = 5,
    CrossTrade = 6,
    Halt = 7,
}

impl EventType {
    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            1 => Self::Submission,
            2 => Self::Cancellation,
            3 => Self::Deletion,
            4 => Self::ExecVisible,
            5 => Self::ExecHidden,
            6 => Self::CrossTrade,
            7 => Self::Halt,
            _ => return None,
        })
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    /// Execution of a resting limit order (visible or hidden).
    pub fn is_execution(self) -> bool {
        matches!(self, Self::ExecVisible | Self::ExecHidden)
    }
}

/// Side of an order. For a message row this is the side of the limit order
/// the event refers to; for a market order it is the aggressor's side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    pub fn from_sign(sign: i64) -> Option<Self> {
        match sign {
            1 => Some(Side::Buy),
            -1 => Some(Side::Sell),
            _ => None,
        }
    }

    /// +1 for buy, -1 for sell.
    pub fn sign(self) -> i64 {
        match self {
            Side::Buy => 1,
            Side::Sell => -1,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Side::Buy => Side::Sell,
            Side::Sell => Side::Buy,
        }
    }
}

/// One row of a LOBSTER message file.
///
/// Prices are integers in units of 1e-4 dollars; `time_ns` is nanoseconds
/// after midnight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub time_ns: i64,
    pub order_id: u64,
    pub price: i64,
    pub size: u32,
    pub event_type: EventType,
    pub direction: Side,
}

impl EventRecord {
    /// Checks the per-row invariants, returning a description of the first
    /// violation found.
    pub fn check(&self) -> Option<&'static str> {
        if !(0..DAY_NANOS).contains(&self.time_ns) {
            return Some("time outside [0, 86400) s");
        }
        if self.event_type == EventType::Halt {
            // Halt rows use price as a status flag (-1 halt, 0 quote, 1 resume)
            // and carry no size.
            return None;
        }
        if self.size == 0 {
            return Some("non-positive size");
        }
        if self.price <= 0 {
            return Some("non-positive price");
        }
        if self.event_type == EventType::ExecHidden && self.order_id != 0 {
            return Some("hidden execution with non-zero order id");
        }
        None
    }
}

/// Parses `HH:MM` or `HH:MM:SS` into nanoseconds after midnight.
pub fn parse_clock(s: &str) -> Option<i64> {
    let mut parts = s.trim().split(':');
    let h: i64 = parts.next()?.parse().ok()?;
    let m: i64 = parts.next()?.parse().ok()?;
    let sec: i64 = match parts.next() {
        Some(p) => p.parse().ok()?,
        None => 0,
    };
    if parts.next().is_some() || !(0..=24).contains(&h) || !(0..60).contains(&m) || !(0..60).contains(&sec) {
        return None;
    }
    let total = (h * 3600 + m * 60 + sec) * NANOS_PER_SEC;
    (total <= DAY_NANOS).then_some(total)
}
