use crate::qstate::Label;
use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown qubit label {0}")]
    UnknownLabel(Label),
    #[error("qubit label {0} already present")]
    DuplicateLabel(Label),
    #[error("gate targets must be distinct")]
    DuplicateTargets,
    #[error("gate {gate} takes {expected} target(s), got {got}")]
    Arity {
        gate: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("register would hold {requested} qubits, cap is {cap}")]
    RegisterFull { requested: usize, cap: usize },
    #[error("label sets differ")]
    LabelMismatch,
    #[error("invalid amplitudes: {0}")]
    InvalidAmplitudes(String),
    #[error("requested measurement branch has zero probability")]
    ZeroProbabilityBranch,
    #[error("invalid parameter {name}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        constraint: String,
    },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("graph has {vertices} vertices, limit is {cap}")]
    GraphTooLarge { vertices: usize, cap: usize },
    #[error("pattern does not match graph: {0}")]
    PatternMismatch(String),
    #[error("invalid emitter assignment: {0}")]
    InvalidAssignment(String),
    #[error("edge ({0}, {1}) cannot be linked with a spin-spin CZ under this assignment")]
    UnlinkableEdge(usize, usize),
    #[error("graph admits no stabilizer test")]
    NoValidTests,
    #[error("Hoeffding {side} tail needs k {relation} np (k = {k}, np = {np})")]
    HoeffdingSide {
        side: &'static str,
        relation: &'static str,
        k: f64,
        np: f64,
    },
    #[error("no positive gap: eta1 = {eta1} does not exceed p2 = {p2}")]
    NoPositiveGap { eta1: f64, p2: f64 },
    #[error("ODE step {dt} exceeds stability limit {limit}")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("enumeration too large: {0}")]
    EnumerationTooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, constraint: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        constraint: constraint.into(),
    }
}
