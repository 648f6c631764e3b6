#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

//! LOBSTER limit-order-book parsing, market-impact estimation and
//! impact-model fitting.

pub mod bars;
pub mod error;
pub mod impact;
pub mod ingest;
pub mod preprocess;
pub mod price;
pub mod regress;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use price::Mid;
