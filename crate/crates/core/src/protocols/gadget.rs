use super::server::{HonestServer, ServerPolicy};
use super::transcript::{Direction, Payload, Transcript};
use crate::emitter::emit_photon;
use crate::error::{invalid, Result};
use crate::pulses::{multiphoton_prob, sample_photon_number, server_view, PulseRecord};
use crate::qstate::{Angle8, Basis, Gate, Label, PureState};
use crate::sampling::{run_trials, Chooser, RateEstimate};
use crate::secbounds::equilibrium_threshold;
use rand::Rng;

/// Parameters of the GHZ gadget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GadgetParams {
    pub alpha_sq: f64,
    pub n: usize,
    /// abort iff |S| ≤ t
    pub t: f64,
    pub eta1: f64,
}

impl GadgetParams {
    pub fn new(alpha_sq: f64, n: usize, t: f64, eta1: f64) -> Result<Self> {
        if !(alpha_sq > 0.0 && alpha_sq.is_finite()) {
            return Err(invalid("alpha_sq", format!("must be > 0, got {alpha_sq}")));
        }
        if n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        if !(0.0..=n as f64).contains(&t) {
            return Err(invalid("t", format!("must lie in [0, {n}], got {t}")));
        }
        if !(0.0..=1.0).contains(&eta1) {
            return Err(invalid("eta1", format!("must lie in [0, 1], got {eta1}")));
        }
        Ok(Self {
            alpha_sq,
            n,
            t,
            eta1,
        })
    }

    /// Threshold t = (η₁ + p₂)/2 · n.
    pub fn with_default_threshold(alpha_sq: f64, n: usize, eta1: f64) -> Result<Self> {
        let p2 = multiphoton_prob(alpha_sq)?;
        Self::new(alpha_sq, n, equilibrium_threshold(eta1, p2, n as u64), eta1)
    }
}

/// A final RZ(client + server) on the gadget photon that has not been applied
/// yet. `client` is Alice's θ̄ part, `server` Bob's bπ part.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DeferredCorrection {
    pub client: Angle8,
    pub server: Angle8,
}

impl DeferredCorrection {
    pub fn total(&self) -> Angle8 {
        self.client + self.server
    }

    /// The correction after commuting it past X^bit.
    pub fn flipped_if(self, bit: bool) -> Self {
        Self {
            client: self.client.flipped_if(bit),
            server: self.server.flipped_if(bit),
        }
    }
}

/// Whether the final correction is applied or handed back.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CorrectionMode {
    #[default]
    Immediate,
    Deferred,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GadgetSuccess {
    /// The whole register, now including `photon`.
    pub state: PureState,
    pub photon: Label,
    pub m_x: bool,
    /// Present only in [`CorrectionMode::Deferred`].
    pub deferred: Option<DeferredCorrection>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GadgetOutcome {
    Abort,
    Success(GadgetSuccess),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GadgetRun {
    pub outcome: GadgetOutcome,
    pub transcript: Transcript,
    /// Number of pulses that produced a photon.
    pub emitted: usize,
}

impl GadgetRun {
    pub fn aborted(&self) -> bool {
        matches!(self.outcome, GadgetOutcome::Abort)
    }
}

/// Ideal blind extender: uniform b, then CNOT(spin → |0⟩) and RZ((−1)^b θ)
/// on the new qubit.
pub fn resource_blind_extender<C: Chooser + ?Sized>(
    theta: Angle8,
    state: &mut PureState,
    spin: Label,
    new_photon: Label,
    rng: &mut C,
) -> Result<bool> {
    let b = rng.fair_bit();
    emit_photon(state, spin, theta.flipped_if(b), new_photon)?;
    Ok(b)
}

/// α|0⟩⊗|0⟩ + e^{i(−1)^{m} θ}β|1⟩⊗|1⟩ built from `state` by the ideal
/// extender with bit `m`: the target of both gadgets.
pub fn extender_target(state: &PureState, spin: Label, theta: Angle8, m: bool, photon: Label) -> Result<PureState> {
    let mut s = state.clone();
    emit_photon(&mut s, spin, theta.flipped_if(m), photon)?;
    Ok(s)
}

fn finish(
    mut state: PureState,
    photon: Label,
    m_x: bool,
    correction: DeferredCorrection,
    mode: CorrectionMode,
) -> Result<GadgetOutcome> {
    let deferred = match mode {
        CorrectionMode::Immediate => {
            let total = correction.total();
            if total != Angle8::ZERO {
                state.apply1(Gate::Phase(total), photon)?;
            }
            None
        }
        CorrectionMode::Deferred => Some(correction),
    };
    Ok(GadgetOutcome::Success(GadgetSuccess {
        state,
        photon,
        m_x,
        deferred,
    }))
}

/// GHZ gadget with threshold abort.
///
/// Each of the n pulses carries a uniform θ_i and makes the emitter produce a
/// photon with probability η₁. Emitted photons are measured in X right away:
/// that measurement commutes with the later emissions, and doing it early
/// keeps the register small. After photon 0 the server reports S; the client
/// aborts iff |S| ≤ t and otherwise sends θ̄ = (−1)^{m_x}θ − Σ_S θ_i, and the
/// server applies RZ(θ̄ + bπ) with b the parity of its outcomes.
pub fn protocol3_gadget<R: Rng + ?Sized>(
    theta: Angle8,
    params: &GadgetParams,
    mut state: PureState,
    spin: Label,
    server: &mut dyn ServerPolicy,
    mode: CorrectionMode,
    rng: &mut R,
) -> Result<GadgetRun> {
    let n = params.n;
    let mut transcript = Transcript::new();
    let thetas: Vec<Angle8> = (0..n).map(|_| rng.angle()).collect();
    let mut emitted = Vec::new();
    let mut parity = false;
    for (i, &th) in thetas.iter().enumerate() {
        let index = i + 1;
        let k = sample_photon_number(params.alpha_sq, rng)?;
        transcript.push(
            Direction::ClientToServer,
            index,
            Payload::PulseSent {
                view: server_view(&PulseRecord { k, theta: th, index }),
            },
        );
        if rng.bit(params.eta1) {
            let ph = state.fresh_label();
            emit_photon(&mut state, spin, th, ph)?;
            parity ^= state.measure(ph, Basis::X, rng)?;
            emitted.push(index);
        }
    }
    let photon = state.fresh_label();
    emit_photon(&mut state, spin, Angle8::ZERO, photon)?;
    let count = emitted.len();

    let mut reported = server.report_set(emitted);
    reported.retain(|&i| (1..=n).contains(&i));
    reported.dedup();
    transcript.push(Direction::ServerToClient, n + 1, Payload::SetS { indices: reported.clone() });
    if reported.len() as f64 <= params.t {
        transcript.push(Direction::ClientToServer, n + 1, Payload::Abort);
        return Ok(GadgetRun {
            outcome: GadgetOutcome::Abort,
            transcript,
            emitted: count,
        });
    }
    let m_x = rng.fair_bit();
    let theta_bar = theta.flipped_if(m_x) - reported.iter().map(|&i| thetas[i - 1]).sum::<Angle8>();
    transcript.push(Direction::ClientToServer, n + 1, Payload::Correction { theta_bar, m_x });
    let correction = DeferredCorrection {
        client: theta_bar,
        server: Angle8::pi_if(parity),
    };
    Ok(GadgetRun {
        outcome: finish(state, photon, m_x, correction, mode)?,
        transcript,
        emitted: count,
    })
}

/// Post-selected gadget: θ_n pre-compensates the other angles, any lost
/// photon aborts, and the only correction is Z^b on photon 0.
pub fn protocol5_postselected<R: Rng + ?Sized>(
    theta: Angle8,
    alpha_sq: f64,
    n: usize,
    eta1: f64,
    mut state: PureState,
    spin: Label,
    mode: CorrectionMode,
    rng: &mut R,
) -> Result<GadgetRun> {
    GadgetParams::new(alpha_sq, n, 0.0, eta1)?;
    let mut transcript = Transcript::new();
    let mut thetas: Vec<Angle8> = (0..n - 1).map(|_| rng.angle()).collect();
    let m_x = rng.fair_bit();
    thetas.push(theta.flipped_if(m_x) - thetas.iter().sum::<Angle8>());
    let mut parity = false;
    let mut emitted = 0;
    for (i, &th) in thetas.iter().enumerate() {
        let index = i + 1;
        let k = sample_photon_number(alpha_sq, rng)?;
        transcript.push(
            Direction::ClientToServer,
            index,
            Payload::PulseSent {
                view: server_view(&PulseRecord { k, theta: th, index }),
            },
        );
        if rng.bit(eta1) {
            let ph = state.fresh_label();
            emit_photon(&mut state, spin, th, ph)?;
            parity ^= state.measure(ph, Basis::X, rng)?;
            emitted += 1;
        }
    }
    let photon = state.fresh_label();
    emit_photon(&mut state, spin, Angle8::ZERO, photon)?;
    transcript.push(Direction::ClientToServer, n + 1, Payload::OutputBit { m_x });
    if emitted < n {
        transcript.push(Direction::ServerToClient, n + 1, Payload::Abort);
        return Ok(GadgetRun {
            outcome: GadgetOutcome::Abort,
            transcript,
            emitted,
        });
    }
    let correction = DeferredCorrection {
        client: Angle8::ZERO,
        server: Angle8::pi_if(parity),
    };
    Ok(GadgetRun {
        outcome: finish(state, photon, m_x, correction, mode)?,
        transcript,
        emitted,
    })
}

fn spin_plus() -> PureState {
    PureState::plus_theta(Label(0), Angle8::ZERO)
}

/// Monte Carlo abort frequency of the threshold gadget with an honest server.
pub fn gadget_abort_rate(params: &GadgetParams, trials: usize, seed: u64) -> Result<RateEstimate> {
    let flags = run_trials(seed, trials, |rng, _| {
        let theta = rng.angle();
        protocol3_gadget(theta, params, spin_plus(), Label(0), &mut HonestServer, CorrectionMode::Deferred, rng)
            .map(|r| r.aborted())
    });
    Ok(RateEstimate::from_flags(flags.into_iter().collect::<Result<Vec<_>>>()?))
}

/// Monte Carlo abort frequency of the post-selected gadget.
pub fn postselected_abort_rate(alpha_sq: f64, n: usize, eta1: f64, trials: usize, seed: u64) -> Result<RateEstimate> {
    GadgetParams::new(alpha_sq, n, 0.0, eta1)?;
    let flags = run_trials(seed, trials, |rng, _| {
        let theta = rng.angle();
        protocol5_postselected(theta, alpha_sq, n, eta1, spin_plus(), Label(0), CorrectionMode::Deferred, rng)
            .map(|r| r.aborted())
    });
    Ok(RateEstimate::from_flags(flags.into_iter().collect::<Result<Vec<_>>>()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::server::{Deviation, DeviatingServer, HonestServer};
    use crate::qstate::fidelity_up_to_phase;
    use crate::sampling::{enumerate_branches, trial_rng};
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn spin(a: f64, b: Complex64) -> PureState {
        PureState::qubit(Label(0), Complex64::new(a, 0.0), b).unwrap()
    }

    fn check_success(run: &GadgetRun, input: &PureState, theta: Angle8) {
        match &run.outcome {
            GadgetOutcome::Success(s) => {
                let target = extender_target(input, Label(0), theta, s.m_x, s.photon).unwrap();
                let f = fidelity_up_to_phase(&s.state, &target).unwrap();
                assert!((f - 1.0).abs() < 1e-10, "fidelity {f}");
            }
            GadgetOutcome::Abort => panic!("unexpected abort"),
        }
    }

    #[test]
    fn params_validation() {
        assert!(GadgetParams::new(0.0, 5, 1.0, 0.9).is_err());
        assert!(GadgetParams::new(0.5, 0, 0.0, 0.9).is_err());
        assert!(GadgetParams::new(0.5, 5, 6.0, 0.9).is_err());
        assert!(GadgetParams::new(0.5, 5, 1.0, 1.5).is_err());
        let p = GadgetParams::with_default_threshold(0.5, 100, 0.9).unwrap();
        assert!((p.t - 49.51).abs() < 1e-3);
    }

    #[test]
    fn extender_examples() {
        let plus = PureState::plus_theta(Label(0), Angle8::ZERO);
        let branches = enumerate_branches(|c| {
            let mut s = plus.clone();
            let b = resource_blind_extender(Angle8::PI_4, &mut s, Label(0), Label(1), c).unwrap();
            (b, s)
        });
        for (p, (b, s)) in branches {
            assert!((p - 0.5).abs() < 1e-15);
            let ph = if b { Angle8::new(-1) } else { Angle8::PI_4 };
            let a = s.amplitudes();
            assert!((a[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
            assert!((a[3] - ph.phase() * FRAC_1_SQRT_2).norm() < 1e-15);
        }
    }

    #[test]
    fn trivial_gadget_makes_bell_pair() {
        let p = GadgetParams::new(0.5, 1, 0.0, 1.0).unwrap();
        let input = PureState::plus_theta(Label(0), Angle8::ZERO);
        let mut rng = trial_rng(0, 0);
        for _ in 0..20 {
            let run = protocol3_gadget(Angle8::ZERO, &p, input.clone(), Label(0), &mut HonestServer, CorrectionMode::Immediate, &mut rng).unwrap();
            check_success(&run, &input, Angle8::ZERO);
        }
    }

    #[test]
    fn lossless_gadget_is_exact() {
        let p = GadgetParams::new(0.5, 4, 0.0, 1.0).unwrap();
        let input = spin(0.6, Complex64::new(0.0, 0.8));
        let mut rng = trial_rng(1, 0);
        for _ in 0..200 {
            let run = protocol3_gadget(Angle8::new(3), &p, input.clone(), Label(0), &mut HonestServer, CorrectionMode::Immediate, &mut rng).unwrap();
            check_success(&run, &input, Angle8::new(3));
        }
    }

    #[test]
    fn lossy_gadget_is_exact_when_not_aborting() {
        let p = GadgetParams::new(0.5, 8, 3.0, 0.7).unwrap();
        let input = spin(0.8, Complex64::new(0.36, 0.48));
        let mut rng = trial_rng(2, 0);
        let mut ok = 0;
        for _ in 0..300 {
            let run = protocol3_gadget(Angle8::new(5), &p, input.clone(), Label(0), &mut HonestServer, CorrectionMode::Immediate, &mut rng).unwrap();
            if !run.aborted() {
                check_success(&run, &input, Angle8::new(5));
                ok += 1;
            }
        }
        assert!(ok > 200);
    }

    #[test]
    fn transcript_structure() {
        let p = GadgetParams::new(2.0, 3, 0.0, 1.0).unwrap();
        let mut rng = trial_rng(3, 0);
        let run = protocol3_gadget(Angle8::PI_2, &p, PureState::plus_theta(Label(0), Angle8::ZERO), Label(0), &mut HonestServer, CorrectionMode::Immediate, &mut rng).unwrap();
        let m = run.transcript.messages();
        assert_eq!(m.len(), 5);
        assert!(m[..3].iter().all(|x| matches!(x.payload, Payload::PulseSent { .. })));
        assert_eq!(m[3].payload, Payload::SetS { indices: vec![1, 2, 3] });
        assert!(matches!(m[4].payload, Payload::Correction { .. }));
    }

    #[test]
    fn dropped_index_breaks_output() {
        let p = GadgetParams::new(0.5, 3, 0.0, 1.0).unwrap();
        let input = PureState::plus_theta(Label(0), Angle8::ZERO);
        let mut bad = 0;
        for seed in 0..50 {
            let mut rng = trial_rng(seed, 0);
            let mut server = DeviatingServer::new(vec![Deviation::DropFromSet { count: 1 }]);
            let run = protocol3_gadget(Angle8::ZERO, &p, input.clone(), Label(0), &mut server, CorrectionMode::Immediate, &mut rng).unwrap();
            if let GadgetOutcome::Success(s) = run.outcome {
                let target = extender_target(&input, Label(0), Angle8::ZERO, s.m_x, s.photon).unwrap();
                if fidelity_up_to_phase(&s.state, &target).unwrap() < 1.0 - 1e-9 {
                    bad += 1;
                }
            }
        }
        assert!(bad > 30);
    }

    #[test]
    fn abort_when_too_few_photons() {
        let p = GadgetParams::new(0.5, 5, 5.0, 1.0).unwrap();
        let mut rng = trial_rng(4, 0);
        let run = protocol3_gadget(Angle8::ZERO, &p, PureState::plus_theta(Label(0), Angle8::ZERO), Label(0), &mut HonestServer, CorrectionMode::Immediate, &mut rng).unwrap();
        assert!(run.aborted());
        assert_eq!(run.transcript.messages().last().unwrap().payload, Payload::Abort);
    }

    #[test]
    fn deferred_correction_matches_immediate() {
        let p = GadgetParams::new(0.5, 4, 0.0, 1.0).unwrap();
        let input = spin(0.6, Complex64::new(0.0, 0.8));
        let mut rng = trial_rng(5, 0);
        let run = protocol3_gadget(Angle8::new(7), &p, input.clone(), Label(0), &mut HonestServer, CorrectionMode::Deferred, &mut rng).unwrap();
        let GadgetOutcome::Success(mut s) = run.outcome else { panic!() };
        let d = s.deferred.unwrap();
        s.state.apply1(Gate::Phase(d.total()), s.photon).unwrap();
        let target = extender_target(&input, Label(0), Angle8::new(7), s.m_x, s.photon).unwrap();
        assert!((fidelity_up_to_phase(&s.state, &target).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn postselected_lossless_is_exact() {
        let input = spin(0.6, Complex64::new(0.0, 0.8));
        let mut rng = trial_rng(6, 0);
        for _ in 0..100 {
            let run = protocol5_postselected(Angle8::PI_2, 0.5, 3, 1.0, input.clone(), Label(0), CorrectionMode::Immediate, &mut rng).unwrap();
            check_success(&run, &input, Angle8::PI_2);
        }
    }

    #[test]
    fn postselected_transcript_sends_bit_then_abort() {
        let mut rng = trial_rng(7, 0);
        let run = protocol5_postselected(Angle8::PI_2, 0.5, 3, 0.0, PureState::plus_theta(Label(0), Angle8::ZERO), Label(0), CorrectionMode::Immediate, &mut rng).unwrap();
        assert!(run.aborted());
        let m = run.transcript.messages();
        assert!(matches!(m[3].payload, Payload::OutputBit { .. }));
        assert_eq!(m[4].payload, Payload::Abort);
    }
}
