//! Simulation toolkit for interferometric Bell-state measurements on
//! polarization-entangled photon pairs.
//!
//! The crate models optical circuits exactly (sparse Fock-state algebra over
//! labeled modes), classifies detection patterns, scores measurement quality,
//! emulates multiplexed on/off detector banks with loss, degrades inputs
//! through visibility-based dephasing, and extrapolates swap success to
//! relay chains.

pub mod detector;
pub mod elements;
pub mod error;
pub mod fock;
pub mod metrics;
pub mod noise;
pub mod relay;
pub mod schemes;

pub use error::{Error, Result};
