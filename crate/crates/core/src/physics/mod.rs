//! Excitation of a two-level emitter by a square coherent pulse: closed-form
//! and ODE single-photon efficiency, pulse-area optimisation and the sweep
//! of the security gap η₁ − p₂ against pulse intensity.

mod ode;
mod optimize;
mod sweep;
mod two_level;

pub use ode::{eta1_numeric, integrate_two_level, default_step};
pub use optimize::{golden_section_max, maximize_eta1, Eta1Max};
pub use sweep::{
    find_crossing, formula_discrepancy, security_gap_sweep, Crossing, DiscrepancyReport,
    DiscrepancyRow, EmissionModel, SweepRow, REFERENCE_POINTS,
};
pub use two_level::{eta1_analytic, eta1_printed_formula, DriveParams};
