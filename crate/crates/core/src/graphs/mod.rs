//! Graphs, blind graph states, MBQC execution with flow corrections, and
//! stabilizer tests.

mod file;
mod graph;
mod pattern;
mod stabilizer;

pub use file::{load_graph_file, parse_graph_document, GraphDocument};
pub use graph::{build_blind_graph_state, vertex_label, Graph, GraphParts, Vertex};
pub use pattern::{flow_update, run_mbqc, MeasurementPattern};
pub(crate) use pattern::input_bit_map;
pub use stabilizer::{enumerate_tests, Pauli, StabilizerTest, MAX_TEST_VERTICES};
