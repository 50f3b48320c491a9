//! Classic probabilistic streaming algorithms.
//!
//! - [`morris`]: approximate counting (binary and base-q logarithmic counters,
//!   plus the floating-point significand/exponent counter).
//! - [`fm`]: probabilistic counting with a single bitmap and with stochastic
//!   averaging over `m = 2^k` substreams (PCSA).
//! - [`adaptive`]: adaptive (distinct) sampling with a bounded cache and
//!   per-element frequency counters.
//! - [`analysis`]: the bias-correction constant `φ` by three independent
//!   routes, and exact small-n oracles used as ground truth in tests.
//! - [`hashcore`]: seeded uniformizing hash, leftmost-one rank, substream
//!   splitting and Bernoulli trials.
//!
//! The crate is `no_std` and only needs `alloc`. IO, serialization and the
//! command-line front end live in `streamcount-cli`.
//!
//! ```
//! use streamcount::fm::PcsaSketch;
//! use streamcount::hashcore::HashFunction;
//!
//! let mut sketch = PcsaSketch::new(6, HashFunction::new(7)).unwrap();
//! for i in 0..5000u32 {
//!     sketch.add(&i.to_le_bytes());
//! }
//! let est = sketch.estimate();
//! assert!(est > 3500.0 && est < 6500.0);
//! ```
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adaptive;
pub mod analysis;
mod error;
pub mod fm;
pub mod hashcore;
pub mod morris;

pub use error::{Error, Result};
