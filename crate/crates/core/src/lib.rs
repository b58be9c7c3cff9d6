//! Simulation toolkit for delegated quantum computation with semi-classical
//! clients driving quantum emitters through weak coherent pulses.
//!
//! The crate executes the client/server protocols exactly on small state
//! vectors, checks the security simulators by exact distribution comparison,
//! evaluates the analytic bounds, and models two-level emitter excitation.

pub mod adversary;
pub mod emitter;
pub mod error;
pub mod graphs;
pub mod physics;
pub mod protocols;
pub mod pulses;
pub mod qstate;
pub mod sampling;
pub mod secbounds;

pub use error::{Error, Result};
pub use qstate::{Angle8, Basis, DensityOracle, Gate, Label, PureState};
