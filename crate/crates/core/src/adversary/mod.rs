//! Security simulators and exact comparisons of server views.

mod checks;
mod gadget;
mod sim1;
mod view;

pub use checks::{
    blindness_check, blindness_table, classical_view_distribution, count_patterns, index_subsets,
    simulator2_equivalence, simulator2_error_rate, simulator2_table, simulator3_equivalence, simulator3_error_rate,
    simulator3_table, BlindnessReport, EquivalenceReport, MAX_ENUMERATED_PULSES,
};
pub use gadget::{
    real_gadget_view, real_postselected_view, simulator2_gadget, simulator2_with_counts, simulator3_postselected,
    simulator3_with_counts, ClassicalView, ClientMessage, GadgetView, SetPolicy, SimOutcome,
};
pub use sim1::{real_extender_calls, simulator1_discrepancy, simulator1_graph, ExtenderCall, ExtenderResult};
pub use view::{total_variation, ViewDistribution};
