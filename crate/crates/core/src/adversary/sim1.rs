//! Simulator for the blind graph RSP protocol against a malicious server.

use crate::error::{invalid, Error, Result};
use crate::graphs::{vertex_label, Graph};
use crate::protocols::resource_blind_extender;
use crate::qstate::{fidelity_up_to_phase, Angle8, Basis, Gate, Label, PureState};
use crate::sampling::{enumerate_branches, Chooser};
use std::collections::BTreeMap;

/// Oracle qubits are moved here so they cannot clash with server labels.
const ORACLE_BASE: u32 = 1 << 30;

/// One call a server makes to the blind extender: the qubit it hands in,
/// the label the returned photon gets, and the gates it applies to its own
/// register just before the call.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtenderCall {
    pub control: Label,
    pub photon: Label,
    pub gates_before: Vec<(Gate, Vec<Label>)>,
}

impl ExtenderCall {
    pub fn new(control: Label, photon: Label) -> Self {
        Self {
            control,
            photon,
            gates_before: Vec::new(),
        }
    }

    pub fn with_gates(mut self, gates: Vec<(Gate, Vec<Label>)>) -> Self {
        self.gates_before = gates;
        self
    }
}

/// The server's register after all calls, and the bit returned by each.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtenderResult {
    pub state: PureState,
    pub bits: Vec<bool>,
}

fn apply_gates(state: &mut PureState, gates: &[(Gate, Vec<Label>)]) -> Result<()> {
    for (g, t) in gates {
        state.apply(*g, t)?;
    }
    Ok(())
}

/// The server's calls answered by the ideal extender with angles `thetas`.
pub fn real_extender_calls<C: Chooser + ?Sized>(
    thetas: &[Angle8],
    server_state: PureState,
    calls: &[ExtenderCall],
    rng: &mut C,
) -> Result<ExtenderResult> {
    if thetas.len() != calls.len() {
        return Err(invalid("calls", "one call per angle"));
    }
    let mut state = server_state;
    let mut bits = Vec::with_capacity(calls.len());
    for (call, &theta) in calls.iter().zip(thetas) {
        apply_gates(&mut state, &call.gates_before)?;
        bits.push(resource_blind_extender(theta, &mut state, call.control, call.photon, rng)?);
    }
    Ok(ExtenderResult { state, bits })
}

/// The same calls answered from a single copy of |G(θ⃗)⟩ with θ⃗ unknown.
///
/// The simulator strips the CZ layer to get ⊗|+_θv⟩, then for call v:
/// CNOT from the server qubit onto oracle qubit v, Z-measures the oracle
/// qubit for the returned bit, and copies the server qubit onto a fresh |0⟩.
pub fn simulator1_graph<C: Chooser + ?Sized>(
    graph: &Graph,
    oracle_state: PureState,
    server_state: PureState,
    calls: &[ExtenderCall],
    rng: &mut C,
) -> Result<ExtenderResult> {
    let n = graph.len();
    if calls.len() != n {
        return Err(invalid("calls", "one call per vertex"));
    }
    let mut expected: Vec<Label> = (0..n).map(vertex_label).collect();
    let mut got = oracle_state.labels().to_vec();
    expected.sort_unstable();
    got.sort_unstable();
    if expected != got {
        return Err(Error::LabelMismatch);
    }
    let oracle_label = |v: usize| Label(ORACLE_BASE + v as u32);
    let mut oracle = oracle_state;
    for v in 0..n {
        oracle.relabel(vertex_label(v), oracle_label(v))?;
    }
    for &(a, b) in graph.edges() {
        oracle.apply2(Gate::Cz, oracle_label(a), oracle_label(b))?;
    }

    let mut state = server_state.tensor(&oracle)?;
    let mut bits = Vec::with_capacity(n);
    for (v, call) in calls.iter().enumerate() {
        apply_gates(&mut state, &call.gates_before)?;
        state.apply2(Gate::Cnot, call.control, oracle_label(v))?;
        bits.push(state.measure(oracle_label(v), Basis::Z, rng)?);
        state.add_zero(call.photon)?;
        state.apply2(Gate::Cnot, call.control, call.photon)?;
    }
    Ok(ExtenderResult { state, bits })
}

/// Largest disagreement between the real and simulated branches, over all
/// bit strings: |Δ probability| plus (1 − fidelity) of the states.
pub fn simulator1_discrepancy(
    graph: &Graph,
    thetas: &[Angle8],
    server_state: &PureState,
    calls: &[ExtenderCall],
) -> Result<f64> {
    let oracle = crate::graphs::build_blind_graph_state(graph, thetas)?;
    let collect = |branches: Vec<(f64, Result<ExtenderResult>)>| -> Result<BTreeMap<Vec<bool>, (f64, PureState)>> {
        let mut out = BTreeMap::new();
        for (p, r) in branches {
            let r = r?;
            if out.insert(r.bits, (p, r.state)).is_some() {
                return Err(invalid("calls", "bit strings must identify branches"));
            }
        }
        Ok(out)
    };
    let real = collect(enumerate_branches(|c| {
        real_extender_calls(thetas, server_state.clone(), calls, c)
    }))?;
    let sim = collect(enumerate_branches(|c| {
        simulator1_graph(graph, oracle.clone(), server_state.clone(), calls, c)
    }))?;
    if real.len() != sim.len() {
        return Ok(1.0);
    }
    let mut worst: f64 = 0.0;
    for (bits, (p, s)) in &real {
        let Some((q, t)) = sim.get(bits) else {
            return Ok(1.0);
        };
        let f = fidelity_up_to_phase(s, t)?;
        worst = worst.max((p - q).abs() + (1.0 - f).abs());
    }
    Ok(worst)
}
