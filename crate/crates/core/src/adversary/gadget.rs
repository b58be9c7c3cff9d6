//! Server views of the two GHZ gadgets against a malicious server, real and
//! simulated.
//!
//! The server is modelled at its worst: it counts photons in every pulse,
//! learns θ_i outright when k_i ≥ 2, and keeps the qubit |+_θi⟩ when
//! k_i = 1. Each kept qubit is its own single-qubit register labelled by the
//! pulse index, so the view stays representable for long pulse trains.

use crate::error::{invalid, Result};
use crate::pulses::{sample_photon_number, server_view, LeakView, PulseRecord};
use crate::qstate::{Angle8, Basis, Gate, Label, PureState};
use crate::sampling::Chooser;
use rand::Rng;
use serde::Serialize;

const EPR_BASE: u32 = 1 << 29;
const ORACLE: Label = Label(1 << 30);

/// How the server picks the set S it reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetPolicy {
    /// A fixed set of 1-based pulse indices.
    Fixed(Vec<usize>),
    /// Every pulse with two or more photons: the choice that maximises the
    /// chance of the simulator failing.
    MultiPhoton,
}

impl SetPolicy {
    fn select(&self, counts: &[u64]) -> Result<Vec<usize>> {
        let mut s = match self {
            SetPolicy::Fixed(s) => s.clone(),
            SetPolicy::MultiPhoton => (1..=counts.len()).filter(|&i| counts[i - 1] >= 2).collect(),
        };
        s.sort_unstable();
        s.dedup();
        if s.iter().any(|&i| i == 0 || i > counts.len()) {
            return Err(invalid("S", format!("indices must lie in 1..={}", counts.len())));
        }
        Ok(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Abort,
    Correction { theta_bar: Angle8, m_x: bool },
    OutputBit { m_x: bool },
}

/// Classical part of the server's view.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClassicalView {
    pub leaks: Vec<LeakView>,
    pub reported: Vec<usize>,
    pub message: ClientMessage,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GadgetView {
    pub classical: ClassicalView,
    /// One single-qubit register per single-photon pulse, in pulse order.
    pub qubits: Vec<PureState>,
}

impl GadgetView {
    /// All kept qubits as one register.
    pub fn joint_state(&self) -> Result<PureState> {
        self.qubits.iter().try_fold(PureState::new(), |acc, q| acc.tensor(q))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SimOutcome {
    /// The simulator cannot continue: the server distinguishes it.
    Error,
    View(GadgetView),
}

impl SimOutcome {
    pub fn is_error(&self) -> bool {
        matches!(self, SimOutcome::Error)
    }
}

fn leaks(counts: &[u64], thetas: &[Angle8]) -> Vec<LeakView> {
    counts
        .iter()
        .zip(thetas)
        .enumerate()
        .map(|(i, (&k, &theta))| server_view(&PulseRecord { k, theta, index: i + 1 }))
        .collect()
}

fn pulse_label(i: usize) -> Label {
    Label(i as u32)
}

fn check_counts(counts: &[u64]) -> Result<()> {
    if counts.is_empty() {
        return Err(invalid("k", "at least one pulse"));
    }
    Ok(())
}

fn check_oracle(oracle: &PureState) -> Result<()> {
    if oracle.num_qubits() != 1 {
        return Err(invalid("oracle", "a single qubit"));
    }
    Ok(())
}

/// Honest client of the threshold gadget facing a server that receives
/// pulses with photon numbers `counts` and reports S by `policy`.
/// Abort iff |S| ≤ `t`.
pub fn real_gadget_view<C: Chooser + ?Sized>(
    theta: Angle8,
    counts: &[u64],
    policy: &SetPolicy,
    t: f64,
    rng: &mut C,
) -> Result<GadgetView> {
    check_counts(counts)?;
    let thetas: Vec<Angle8> = counts.iter().map(|_| rng.angle()).collect();
    let qubits = (1..=counts.len())
        .filter(|&i| counts[i - 1] == 1)
        .map(|i| PureState::plus_theta(pulse_label(i), thetas[i - 1]))
        .collect();
    let reported = policy.select(counts)?;
    let message = if reported.len() as f64 <= t {
        ClientMessage::Abort
    } else {
        let m_x = rng.fair_bit();
        let theta_bar = theta.flipped_if(m_x) - reported.iter().map(|&i| thetas[i - 1]).sum::<Angle8>();
        ClientMessage::Correction { theta_bar, m_x }
    };
    Ok(GadgetView {
        classical: ClassicalView {
            leaks: leaks(counts, &thetas),
            reported,
            message,
        },
        qubits,
    })
}

/// Simulator for the threshold gadget with given photon numbers. It sees
/// only the oracle qubit |+_θ⟩, never θ.
pub fn simulator2_with_counts<C: Chooser + ?Sized>(
    counts: &[u64],
    policy: &SetPolicy,
    t: f64,
    oracle: PureState,
    rng: &mut C,
) -> Result<SimOutcome> {
    check_counts(counts)?;
    check_oracle(&oracle)?;
    let n = counts.len();
    let thetas: Vec<Angle8> = counts.iter().map(|_| rng.angle()).collect();
    let epr = |i: usize| Label(EPR_BASE + i as u32);

    // EPR pair per single-photon pulse; the half labelled by the pulse goes out
    let mut regs: Vec<Option<PureState>> = vec![None; n + 1];
    for i in (1..=n).filter(|&i| counts[i - 1] == 1) {
        let mut r = PureState::new();
        r.add_plus(epr(i))?;
        r.add_zero(pulse_label(i))?;
        r.apply2(Gate::Cnot, epr(i), pulse_label(i))?;
        regs[i] = Some(r);
    }
    let leaks = leaks(counts, &thetas);
    let reported = policy.select(counts)?;

    let message = if reported.len() as f64 <= t {
        ClientMessage::Abort
    } else {
        let singles: Vec<usize> = reported.iter().copied().filter(|&i| counts[i - 1] == 1).collect();
        let vacua: Vec<usize> = reported.iter().copied().filter(|&i| counts[i - 1] == 0).collect();
        let s = if !singles.is_empty() {
            singles[rng.uniform_index(singles.len())]
        } else if !vacua.is_empty() {
            vacua[rng.uniform_index(vacua.len())]
        } else {
            return Ok(SimOutcome::Error);
        };

        let mut theta_bar = Angle8::ZERO;
        for &i in reported.iter().filter(|&&i| i != s) {
            let mut shift = thetas[i - 1];
            if let Some(r) = regs[i].as_mut() {
                let m = r.measure(epr(i), Basis::Rotated(-thetas[i - 1]), rng)?;
                shift += Angle8::pi_if(m);
            }
            theta_bar -= shift;
        }

        let (m_sx, m_sz) = if counts[s - 1] == 1 {
            let mut o = oracle;
            o.relabel(o.labels()[0], ORACLE)?;
            o.apply1(Gate::Phase(thetas[s - 1]), ORACLE)?;
            let mut joint = o.tensor(regs[s].as_ref().expect("single-photon register"))?;
            joint.apply2(Gate::Cnot, ORACLE, epr(s))?;
            let m_sz = joint.measure(ORACLE, Basis::X, rng)?;
            let m_sx = joint.measure(epr(s), Basis::Z, rng)?;
            regs[s] = Some(joint);
            (m_sx, m_sz)
        } else {
            // nothing to teleport; both bits are uniform in the real protocol
            (rng.fair_bit(), rng.fair_bit())
        };
        theta_bar -= thetas[s - 1].flipped_if(m_sx) + Angle8::pi_if(m_sz);
        ClientMessage::Correction { theta_bar, m_x: m_sx }
    };

    let mut qubits = Vec::new();
    for (i, r) in regs.into_iter().enumerate() {
        if let Some(mut r) = r {
            if r.contains(epr(i)) {
                r.discard(epr(i), rng)?;
            }
            qubits.push(r);
        }
    }
    Ok(SimOutcome::View(GadgetView {
        classical: ClassicalView {
            leaks,
            reported,
            message,
        },
        qubits,
    }))
}

/// Samples photon numbers and runs [`simulator2_with_counts`].
pub fn simulator2_gadget<R: Rng + ?Sized>(
    n: usize,
    alpha_sq: f64,
    t: f64,
    oracle: PureState,
    policy: &SetPolicy,
    rng: &mut R,
) -> Result<SimOutcome> {
    let counts = sample_counts(n, alpha_sq, rng)?;
    simulator2_with_counts(&counts, policy, t, oracle, rng)
}

fn sample_counts<R: Rng + ?Sized>(n: usize, alpha_sq: f64, rng: &mut R) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(invalid("n", "at least one pulse"));
    }
    (0..n).map(|_| sample_photon_number(alpha_sq, rng)).collect()
}

/// Honest client of the post-selected gadget.
pub fn real_postselected_view<C: Chooser + ?Sized>(theta: Angle8, counts: &[u64], rng: &mut C) -> Result<GadgetView> {
    check_counts(counts)?;
    let n = counts.len();
    let mut thetas: Vec<Angle8> = (0..n - 1).map(|_| rng.angle()).collect();
    let m_x = rng.fair_bit();
    thetas.push(theta.flipped_if(m_x) - thetas.iter().sum::<Angle8>());
    let qubits = (1..=n)
        .filter(|&i| counts[i - 1] == 1)
        .map(|i| PureState::plus_theta(pulse_label(i), thetas[i - 1]))
        .collect();
    Ok(GadgetView {
        classical: ClassicalView {
            leaks: leaks(counts, &thetas),
            reported: Vec::new(),
            message: ClientMessage::OutputBit { m_x },
        },
        qubits,
    })
}

/// Simulator for the post-selected gadget with given photon numbers.
pub fn simulator3_with_counts<C: Chooser + ?Sized>(counts: &[u64], oracle: PureState, rng: &mut C) -> Result<SimOutcome> {
    check_counts(counts)?;
    check_oracle(&oracle)?;
    let n = counts.len();
    let singles: Vec<usize> = (1..=n).filter(|&i| counts[i - 1] == 1).collect();
    let vacua: Vec<usize> = (1..=n).filter(|&i| counts[i - 1] == 0).collect();
    let s = if !singles.is_empty() {
        singles[rng.uniform_index(singles.len())]
    } else if !vacua.is_empty() {
        vacua[rng.uniform_index(vacua.len())]
    } else {
        return Ok(SimOutcome::Error);
    };
    let m_sx = rng.fair_bit();
    let mut o = oracle;
    o.relabel(o.labels()[0], pulse_label(s))?;
    if m_sx {
        o.apply1(Gate::X, pulse_label(s))?;
    }
    let mut thetas: Vec<Angle8> = (0..n - 1).map(|_| rng.angle()).collect();
    thetas.push(-thetas.iter().sum::<Angle8>());

    let mut qubits = Vec::new();
    for &i in &singles {
        if i == s {
            o.apply1(Gate::Phase(thetas[i - 1]), pulse_label(i))?;
            qubits.push(o.clone());
        } else {
            qubits.push(PureState::plus_theta(pulse_label(i), thetas[i - 1]));
        }
    }
    Ok(SimOutcome::View(GadgetView {
        classical: ClassicalView {
            leaks: leaks(counts, &thetas),
            reported: Vec::new(),
            message: ClientMessage::OutputBit { m_x: m_sx },
        },
        qubits,
    }))
}

/// Samples photon numbers and runs [`simulator3_with_counts`].
pub fn simulator3_postselected<R: Rng + ?Sized>(
    n: usize,
    alpha_sq: f64,
    oracle: PureState,
    rng: &mut R,
) -> Result<SimOutcome> {
    let counts = sample_counts(n, alpha_sq, rng)?;
    simulator3_with_counts(&counts, oracle, rng)
}
