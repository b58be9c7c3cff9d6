use super::gadget::{
    protocol3_gadget, protocol5_postselected, resource_blind_extender, CorrectionMode, DeferredCorrection,
    GadgetOutcome, GadgetParams,
};
use super::server::ServerPolicy;
use super::transcript::Transcript;
use crate::emitter::emit_photon;
use crate::error::{Error, Result};
use crate::graphs::{vertex_label, Graph, Vertex};
use crate::qstate::{Angle8, Basis, Gate, Label, PureState};
use rand::Rng;

/// Partition of the vertices into emitter chains V_q, plus the number of
/// extra photons emitted for each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmitterAssignment {
    pub chains: Vec<Vec<Vertex>>,
    pub extra: Vec<usize>,
}

impl EmitterAssignment {
    pub fn new(chains: Vec<Vec<Vertex>>, extra: Option<Vec<usize>>) -> Self {
        let n = chains.iter().map(Vec::len).sum();
        Self {
            chains,
            extra: extra.unwrap_or_else(|| vec![0; n]),
        }
    }

    /// One emitter walking the graph in measurement order.
    pub fn single(graph: &Graph) -> Self {
        Self::new(vec![graph.order().to_vec()], None)
    }

    /// One emitter per row of [`Graph::grid`]`(rows, cols)`.
    pub fn grid_rows(rows: usize, cols: usize) -> Self {
        Self::new(
            (0..rows).map(|r| (0..cols).map(|c| r * cols + c).collect()).collect(),
            None,
        )
    }

    /// One emitter per vertex.
    pub fn per_vertex(graph: &Graph) -> Self {
        Self::new(graph.order().iter().map(|&v| vec![v]).collect(), None)
    }

    /// Checks the assignment against `graph`: a partition of V, consecutive
    /// chain vertices adjacent and chains ordered like the graph.
    pub fn validate(&self, graph: &Graph) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidAssignment(m));
        let mut seen = vec![false; graph.len()];
        for chain in &self.chains {
            for (i, &v) in chain.iter().enumerate() {
                if v >= graph.len() {
                    return bad(format!("vertex {v} out of range"));
                }
                if seen[v] {
                    return bad(format!("vertex {v} assigned twice"));
                }
                seen[v] = true;
                if i > 0 {
                    let u = chain[i - 1];
                    if !graph.has_edge(u, v) {
                        return bad(format!("consecutive vertices {u}, {v} are not adjacent"));
                    }
                    if !graph.precedes(u, v) {
                        return bad(format!("chain visits {v} before {u} against the order"));
                    }
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return bad(format!("vertex {v} has no emitter"));
        }
        if self.extra.len() != graph.len() {
            return bad(format!("{} extra counts for {} vertices", self.extra.len(), graph.len()));
        }
        Ok(())
    }
}

/// Implementation of the blind extender used at each vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtenderKind {
    Ideal,
    Gadget(GadgetParams),
    PostSelected { alpha_sq: f64, n: usize, eta1: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RspOptions {
    pub extender: ExtenderKind,
    /// Keep gadget corrections for the measurement stage instead of applying
    /// them.
    pub defer_corrections: bool,
}

impl Default for RspOptions {
    fn default() -> Self {
        Self {
            extender: ExtenderKind::Ideal,
            defer_corrections: false,
        }
    }
}

/// Output of a successful preparation: |G(θ)⟩ on vertex labels, up to the
/// deferred corrections RZ(deferred[v]) on each vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct BlindGraphState {
    pub state: PureState,
    pub extender_bits: Vec<bool>,
    pub deferred: Vec<DeferredCorrection>,
    pub transcript: Transcript,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RspOutcome {
    Aborted { vertex: Vertex, transcript: Transcript },
    Prepared(BlindGraphState),
}

struct Emitter {
    spin: Label,
    /// Vertex the spin still encodes (H not yet applied).
    at: Option<Vertex>,
}

/// Blind graph-state preparation with emitters.
///
/// Per vertex in graph order: apply the emitter's pending Hadamard, call the
/// extender, correct with X^b on spin and photon and Z^b on the previous
/// vertex of the chain, emit the extra photons, link to earlier neighbours
/// with spin-spin CZ, and leave the Hadamard pending. Spins are finally
/// retired with Z^c on the last vertex of their chain and the extra photons
/// are measured in X with Z^d on their vertex.
///
/// An edge to an earlier vertex whose emitter has already moved on cannot be
/// produced by a spin-spin CZ and yields [`Error::UnlinkableEdge`].
pub fn protocol2_blind_rsp<R: Rng + ?Sized>(
    graph: &Graph,
    thetas: &[Angle8],
    assignment: &EmitterAssignment,
    options: &RspOptions,
    server: &mut dyn ServerPolicy,
    rng: &mut R,
) -> Result<RspOutcome> {
    assignment.validate(graph)?;
    let n = graph.len();
    if thetas.len() != n {
        return Err(Error::PatternMismatch(format!("{} angles for {n} vertices", thetas.len())));
    }
    let mut chain_of = vec![(0, 0); n];
    for (q, chain) in assignment.chains.iter().enumerate() {
        for (i, &v) in chain.iter().enumerate() {
            chain_of[v] = (q, i);
        }
    }
    let mut state = PureState::new();
    let mut emitters = Vec::new();
    for q in 0..assignment.chains.len() {
        let spin = Label((n + q) as u32);
        state.add_plus(spin)?;
        emitters.push(Emitter { spin, at: None });
    }
    let mut photon_of: Vec<Option<Label>> = vec![None; n];
    let mut extras: Vec<Vec<Label>> = vec![Vec::new(); n];
    let mut bits = vec![false; n];
    let mut deferred = vec![DeferredCorrection::default(); n];
    let mut transcript = Transcript::new();
    let mode = if options.defer_corrections {
        CorrectionMode::Deferred
    } else {
        CorrectionMode::Immediate
    };

    for &v in graph.order() {
        let (q, idx) = chain_of[v];
        let spin = emitters[q].spin;
        if emitters[q].at.take().is_some() {
            state.apply1(Gate::H, spin)?;
        }

        let (photon, b) = match options.extender {
            ExtenderKind::Ideal => {
                let ph = state.fresh_label();
                let b = resource_blind_extender(thetas[v], &mut state, spin, ph, rng)?;
                (ph, b)
            }
            ExtenderKind::Gadget(params) => {
                let run = protocol3_gadget(thetas[v], &params, state, spin, server, mode, rng)?;
                transcript.extend(run.transcript);
                match run.outcome {
                    GadgetOutcome::Abort => return Ok(RspOutcome::Aborted { vertex: v, transcript }),
                    GadgetOutcome::Success(s) => {
                        state = s.state;
                        deferred[v] = s.deferred.unwrap_or_default();
                        (s.photon, s.m_x)
                    }
                }
            }
            ExtenderKind::PostSelected { alpha_sq, n: pulses, eta1 } => {
                let run = protocol5_postselected(thetas[v], alpha_sq, pulses, eta1, state, spin, mode, rng)?;
                transcript.extend(run.transcript);
                match run.outcome {
                    GadgetOutcome::Abort => return Ok(RspOutcome::Aborted { vertex: v, transcript }),
                    GadgetOutcome::Success(s) => {
                        state = s.state;
                        deferred[v] = s.deferred.unwrap_or_default();
                        (s.photon, s.m_x)
                    }
                }
            }
        };
        photon_of[v] = Some(photon);
        bits[v] = b;

        if b {
            state.apply1(Gate::X, spin)?;
            state.apply1(Gate::X, photon)?;
            // X commutes past the pending RZ by flipping its sign
            deferred[v] = deferred[v].flipped_if(true);
            if idx > 0 {
                let prev = assignment.chains[q][idx - 1];
                state.apply1(Gate::Z, photon_of[prev].expect("earlier vertex prepared"))?;
            }
        }

        for _ in 0..assignment.extra[v] {
            let ph = state.fresh_label();
            emit_photon(&mut state, spin, Angle8::ZERO, ph)?;
            extras[v].push(ph);
        }

        let prev = (idx > 0).then(|| assignment.chains[q][idx - 1]);
        for &w in graph.neighbors(v) {
            if !graph.precedes(w, v) || Some(w) == prev {
                continue;
            }
            let r = chain_of[w].0;
            if r == q || emitters[r].at != Some(w) {
                return Err(Error::UnlinkableEdge(w, v));
            }
            state.apply2(Gate::Cz, spin, emitters[r].spin)?;
        }
        emitters[q].at = Some(v);
    }

    for (q, e) in emitters.iter_mut().enumerate() {
        if e.at.take().is_some() {
            state.apply1(Gate::H, e.spin)?;
        }
        let last = *assignment.chains[q].last().expect("non-empty chain");
        let c = state.measure(e.spin, Basis::Z, rng)?;
        if c {
            state.apply1(Gate::Z, photon_of[last].expect("prepared"))?;
        }
    }
    for v in 0..n {
        let photon = photon_of[v].expect("prepared");
        for &ph in &extras[v] {
            if state.measure(ph, Basis::X, rng)? {
                state.apply1(Gate::Z, photon)?;
            }
        }
        state.relabel(photon, vertex_label(v))?;
    }
    Ok(RspOutcome::Prepared(BlindGraphState {
        state,
        extender_bits: bits,
        deferred,
        transcript,
    }))
}
