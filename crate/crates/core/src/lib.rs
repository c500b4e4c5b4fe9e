//! Quantum-wired Rydberg atom arrays for maximum independent set problems.
//!
//! A target graph is rewritten into a base graph plus even-length wires,
//! laid out as atoms, annealed in simulation, and read back by projecting
//! wire atoms away and discarding frustrated outcomes.

pub mod catalog;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod histogram;
pub mod noise;
pub mod pipeline;
pub mod sim;
pub mod wire;

pub use error::{Error, Result};
