//! Rates, capacities and coding-scheme simulation for state-dependent
//! channels whose encoder sees the state sequence with an unknown delay.

pub mod channel;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod prob;
pub mod rates;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
