//! Two arbitrageurs race for the same price discrepancy on a constant-product
//! pool by bidding gas fees. This crate computes the symmetric equilibrium,
//! verifies it against simulation and discretized-game oracles, sweeps
//! comparative statics and classifies historical swaps.

pub mod empirics;
pub mod equilibrium;
pub mod error;
pub mod market;
pub mod statics;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use market::{DerivedQuantities, MarketConfig, MarketParams, PoolState};
