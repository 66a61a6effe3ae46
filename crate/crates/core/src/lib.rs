//! Correlation measures for bipartite quantum states.
//!
//! Four measures compare a state `ρ` with the product of its marginals
//! `ρ₁ ⊗ ρ₂`: trace distance, relative entropy (mutual information), the
//! fidelity angle, and one minus the squared fidelity. The crate evaluates
//! them on arbitrary small states, reproduces their closed forms on diagonal
//! and Werner states, and searches for pairs of states that two measures
//! rank in opposite order.

pub mod error;
pub mod linalg;
pub mod measures;
pub mod ordering;
pub mod report;
pub mod states;

pub use error::{Error, Result};
