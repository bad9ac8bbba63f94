//! Sparse Fock-state machinery: mode registries, superpositions, mixtures
//! and linear mode transformations.

mod registry;
mod state;
mod unitary;

pub use registry::{ModeId, ModeRegistry, Polarization, SpatialId};
pub use state::{Distribution, FockState, MixedState, PureState, NORM_TOLERANCE, PRUNE_THRESHOLD};
pub use unitary::{ModeUnitary, UNITARITY_TOLERANCE};
