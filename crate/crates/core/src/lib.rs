//! Simulation library for repeated principal-agent bandit games.
//!
//! The principal proposes incentives, a greedy agent best-responds, and the
//! principal learns both the agent's preferences and her own rewards.
//! [`ipa`] covers the multi-armed game, [`cipa`] the linear contextual one.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bandit;
pub mod cipa;
pub mod baseline;
pub mod binsearch;
pub mod env;
pub mod geometry;
pub mod error;
pub mod ipa;
pub mod rng;

pub use error::{Error, Result};
