//! Test support for the colocation crates: deterministic synthetic fixtures
//! and naive single-threaded reference implementations used as oracles.
//!
//! Nothing here touches the optimized query paths: distances come from full
//! matrices (Floyd-Warshall on the network side), neighbor sets from whole
//! sorts, and quotients from a direct transcription of their defining
//! ratios.

pub mod fixtures;
pub mod oracle;
