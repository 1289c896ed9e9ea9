//! Pseudo-random quantum states from random circuits and cluster-state
//! (measurement-based) patterns, together with an exact second-moment
//! Markov-chain analysis of how fast they approach Haar-typical behaviour.
//!
//! The crate is organised bottom-up:
//!
//! - [`pauli`]: Pauli strings, the reduced `{0, z, ξ}` alphabet and the
//!   action of a CZ layer on both (a permutation, signs discarded).
//! - [`gates`], [`state`], [`circuit`]: an exact state-vector engine for
//!   pseudo-random circuits (random local gates followed by a CZ layer).
//! - [`mbqc`]: column-streaming simulation of standard and enhanced
//!   cluster-state patterns and their compilation to circuits.
//! - [`metrics`]: Porter-Thomas distance, Meyer-Wallach `Q`, total-variation
//!   distance, decay fits and cut-off detection.
//! - [`markov`]: the full (`4^n`) and reduced (`3^n`) transition matrices,
//!   stationary distributions, evolution and spectral gaps.
//! - [`experiments`]: the figure-level drivers behind the `prq` binary,
//!   emitting reproducible CSV.
//!
//! Everything random is seeded; independent realizations draw from
//! per-index ChaCha streams so results do not depend on thread count.

pub mod circuit;
pub mod error;
pub mod experiments;
pub mod gates;
pub mod markov;
pub mod mbqc;
pub mod metrics;
pub mod pauli;
pub mod rng;
pub mod state;

pub use error::{Error, Result};
