use crate::error::Result;
use crate::graphs::{vertex_label, Vertex};
use crate::qstate::{Gate, PureState};
use std::collections::BTreeSet;

/// Server behaviour. The default methods describe the honest server; an
/// adversarial policy overrides some of them.
pub trait ServerPolicy {
    /// The set S reported in a gadget, given the honestly detected set.
    fn report_set(&mut self, honest: Vec<usize>) -> Vec<usize> {
        honest
    }

    /// Called on the whole register once a graph state is prepared and before
    /// any measurement of delegated round `round`. Vertex v is on
    /// [`vertex_label`]`(v)`.
    fn before_measurements(&mut self, _round: usize, _state: &mut PureState) -> Result<()> {
        Ok(())
    }

    /// The outcome reported for `vertex`, given the measured one.
    fn report_outcome(&mut self, _round: usize, _vertex: Vertex, measured: bool) -> bool {
        measured
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct HonestServer;

impl ServerPolicy for HonestServer {}

/// Entries of the fixed deviation library.
#[derive(Clone, Debug, PartialEq)]
pub enum Deviation {
    /// Apply a single-qubit gate to a vertex qubit before measurements.
    Gate { gate: Gate, vertex: Vertex },
    /// Report the opposite outcome for a vertex.
    FlipOutcome { vertex: Vertex },
    /// Remove the first `count` indices from the reported set S.
    DropFromSet { count: usize },
    /// Claim extra indices in S.
    AddToSet { indices: Vec<usize> },
}

/// Applies a list of deviations, optionally only in some rounds.
#[derive(Clone, Debug, Default)]
pub struct DeviatingServer {
    deviations: Vec<Deviation>,
    rounds: Option<BTreeSet<usize>>,
}

impl DeviatingServer {
    pub fn new(deviations: Vec<Deviation>) -> Self {
        Self {
            deviations,
            rounds: None,
        }
    }

    /// Restricts round-based deviations (gates and flips) to `rounds`.
    pub fn only_rounds(mut self, rounds: impl IntoIterator<Item = usize>) -> Self {
        self.rounds = Some(rounds.into_iter().collect());
        self
    }

    fn active(&self, round: usize) -> bool {
        self.rounds.as_ref().is_none_or(|r| r.contains(&round))
    }
}

impl ServerPolicy for DeviatingServer {
    fn report_set(&mut self, honest: Vec<usize>) -> Vec<usize> {
        let mut set = honest;
        for d in &self.deviations {
            match d {
                Deviation::DropFromSet { count } => {
                    set.drain(..(*count).min(set.len()));
                }
                Deviation::AddToSet { indices } => {
                    for i in indices {
                        if !set.contains(i) {
                            set.push(*i);
                        }
                    }
                    set.sort_unstable();
                }
                _ => {}
            }
        }
        set
    }

    fn before_measurements(&mut self, round: usize, state: &mut PureState) -> Result<()> {
        if !self.active(round) {
            return Ok(());
        }
        for d in &self.deviations {
            if let Deviation::Gate { gate, vertex } = d {
                state.apply1(*gate, vertex_label(*vertex))?;
            }
        }
        Ok(())
    }

    fn report_outcome(&mut self, round: usize, vertex: Vertex, measured: bool) -> bool {
        let flip = self.active(round)
            && self
                .deviations
                .iter()
                .any(|d| matches!(d, Deviation::FlipOutcome { vertex: v } if *v == vertex));
        measured ^ flip
    }
}
