//! Smoothed-analysis laboratory for single-flip local search on Max-Cut and
//! binary Max-CSP.
//!
//! The crate simulates FLIP, computes arcs, improvement vectors and their exact
//! ranks, extracts certified high-rank subsequences, builds low-rank adversarial
//! move sequences, and runs seeded Monte Carlo experiments.

pub mod arcs;
pub mod csp;
pub mod error;
pub mod extraction;
pub mod flip;
pub mod generate;
pub mod hard;
pub mod instance;
pub mod lab;
pub mod rank;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
