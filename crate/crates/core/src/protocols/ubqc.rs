use super::gadget::DeferredCorrection;
use super::rsp::{protocol2_blind_rsp, EmitterAssignment, RspOptions, RspOutcome};
use super::server::ServerPolicy;
use super::transcript::{Direction, Payload, Transcript};
use crate::error::{Error, Result};
use crate::graphs::{build_blind_graph_state, input_bit_map, vertex_label, Graph, MeasurementPattern, StabilizerTest};
use crate::qstate::{Angle8, Basis};
use crate::sampling::Chooser;
use rand::Rng;

/// Where the blind graph state comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSource {
    /// |G(θ)⟩ handed to the server directly.
    Ideal,
    /// Prepared by the emitter protocol.
    Rsp {
        assignment: EmitterAssignment,
        options: RspOptions,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DelegationSettings {
    pub source: StateSource,
    /// With `false`, θ_v = 0 and r_v = 0, so δ_v = φ′_v + x_v·π.
    pub encrypt: bool,
}

impl Default for DelegationSettings {
    fn default() -> Self {
        Self {
            source: StateSource::Ideal,
            encrypt: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UbqcRun {
    /// Output bits on O, or `None` if state preparation aborted.
    pub output: Option<Vec<bool>>,
    pub transcript: Transcript,
    pub thetas: Vec<Angle8>,
    pub r: Vec<bool>,
}

pub(crate) enum RoundPlan<'a> {
    Compute {
        pattern: &'a MeasurementPattern,
        x: Vec<bool>,
    },
    Test(&'a StabilizerTest),
}

pub(crate) struct RoundResult {
    /// Decrypted outcome s_v of every vertex.
    pub outcomes: Option<Vec<bool>>,
    pub transcript: Transcript,
    pub thetas: Vec<Angle8>,
    pub r: Vec<bool>,
}

/// One delegated execution on a fresh blind graph state.
pub(crate) fn delegated_round<R: Rng + ?Sized>(
    graph: &Graph,
    plan: &RoundPlan<'_>,
    settings: &DelegationSettings,
    server: &mut dyn ServerPolicy,
    round: usize,
    rng: &mut R,
) -> Result<RoundResult> {
    let n = graph.len();
    let thetas: Vec<Angle8> = if settings.encrypt {
        (0..n).map(|_| rng.angle()).collect()
    } else {
        vec![Angle8::ZERO; n]
    };
    let mut transcript = Transcript::new();
    let (mut state, deferred) = match &settings.source {
        StateSource::Ideal => (build_blind_graph_state(graph, &thetas)?, vec![DeferredCorrection::default(); n]),
        StateSource::Rsp { assignment, options } => {
            match protocol2_blind_rsp(graph, &thetas, assignment, options, server, rng)? {
                RspOutcome::Aborted { transcript: t, .. } => {
                    transcript.extend(t);
                    return Ok(RoundResult {
                        outcomes: None,
                        transcript,
                        thetas,
                        r: Vec::new(),
                    });
                }
                RspOutcome::Prepared(p) => {
                    transcript.extend(p.transcript);
                    (p.state, p.deferred)
                }
            }
        }
    };
    server.before_measurements(round, &mut state)?;

    let mut s: Vec<Option<bool>> = vec![None; n];
    let mut r = vec![false; n];
    for &v in graph.order() {
        let base = match plan {
            RoundPlan::Compute { pattern, x } => pattern.corrected_angle(v, &s)? + Angle8::pi_if(x[v]),
            RoundPlan::Test(test) => test.angle_for(v, rng),
        };
        if settings.encrypt {
            r[v] = rng.fair_bit();
        }
        let delta = base + thetas[v] + Angle8::pi_if(r[v]);
        let sent = delta - deferred[v].client;
        transcript.push(Direction::ClientToServer, round, Payload::MeasureInstruction { vertex: v, delta: sent });
        let measured = state.measure(vertex_label(v), Basis::Rotated(sent - deferred[v].server), rng)?;
        let bit = server.report_outcome(round, v, measured);
        transcript.push(Direction::ServerToClient, round, Payload::Outcome { vertex: v, bit });
        s[v] = Some(bit ^ r[v]);
    }
    Ok(RoundResult {
        outcomes: Some(s.into_iter().map(|b| b.expect("all measured")).collect()),
        transcript,
        thetas,
        r,
    })
}

/// Blind delegated execution of `pattern` on classical input `x`.
pub fn ubqc_run<R: Rng + ?Sized>(
    graph: &Graph,
    pattern: &MeasurementPattern,
    x: &[bool],
    settings: &DelegationSettings,
    server: &mut dyn ServerPolicy,
    rng: &mut R,
) -> Result<UbqcRun> {
    if pattern.len() != graph.len() {
        return Err(Error::PatternMismatch("pattern size differs from graph".into()));
    }
    let plan = RoundPlan::Compute {
        pattern,
        x: input_bit_map(graph, x)?,
    };
    let res = delegated_round(graph, &plan, settings, server, 0, rng)?;
    Ok(UbqcRun {
        output: res
            .outcomes
            .map(|s| graph.outputs().iter().map(|&v| s[v]).collect()),
        transcript: res.transcript,
        thetas: res.thetas,
        r: res.r,
    })
}
