//! Finite-dimensional toolkit for separate measurements in quantum mechanics.
//!
//! The crate is organised bottom-up:
//!
//! - [`hilbert`]: dense complex vectors and operators, Kronecker products,
//!   spectral decomposition of hermitian operators.
//! - [`measurement`]: projection-valued measures, coarse-grained projectors,
//!   Born probabilities, Lüders collapse and sampling.
//! - [`bipartite`]: embedded observables, joint measurements with couple
//!   outcomes, Schmidt analysis.
//! - [`separation`]: the superposition witness showing that a joint
//!   measurement built from two commuting measurements cannot have every
//!   couple of individually possible outcomes possible, plus a no-cloning
//!   contradiction witness.
//! - [`bell`]: coincidence models and CHSH evaluation, exact and sampled.
//! - [`classical_models`]: exploding rock, rod-connected dice and connected
//!   vessels as coincidence models.
//! - [`product_test`]: operational entities, actual properties, product tests
//!   and the EPR prediction protocol.
//!
//! All sampling goes through explicitly passed RNG handles; see [`streams`].

pub mod bell;
pub mod bipartite;
pub mod classical_models;
pub mod error;
pub mod hilbert;
pub mod measurement;
pub mod separation;
pub mod streams;

pub use error::{Error, Result};
