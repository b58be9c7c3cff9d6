//! Dense state-vector simulation of small labelled registers, with an exact
//! density-matrix oracle for at most five qubits.

mod angle;
mod density;
mod gate;
mod label;
mod pure;

pub use angle::Angle8;
pub use density::{DensityOracle, MAX_ORACLE_QUBITS};
pub use gate::Gate;
pub use label::Label;
pub use pure::{fidelity_up_to_phase, Basis, PureState, MAX_QUBITS};
