//! Weak coherent pulses: Poisson photon numbers and the worst-case view a
//! server gets of each pulse.

use crate::error::{invalid, Result};
use crate::qstate::{Angle8, Label, PureState};
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

/// One client pulse: photon number `k`, polarisation angle and batch index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PulseRecord {
    pub k: u64,
    pub theta: Angle8,
    pub index: usize,
}

/// What a server learns classically from a pulse.
///
/// A single-photon pulse additionally hands over the qubit |+_θ⟩, see
/// [`leak_qubit`]; the classical view only records that it happened.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LeakView {
    Nothing,
    SingleQubit,
    FullLeak { theta: Angle8 },
}

fn check_intensity(alpha_sq: f64) -> Result<()> {
    if alpha_sq.is_finite() && alpha_sq >= 0.0 {
        Ok(())
    } else {
        Err(invalid("alpha_sq", format!("must be finite and >= 0, got {alpha_sq}")))
    }
}

/// Samples a photon number from Poisson(`alpha_sq`).
pub fn sample_photon_number<R: Rng + ?Sized>(alpha_sq: f64, rng: &mut R) -> Result<u64> {
    check_intensity(alpha_sq)?;
    if alpha_sq == 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(alpha_sq).map_err(|e| invalid("alpha_sq", e.to_string()))?;
    Ok(d.sample(rng) as u64)
}

pub fn sample_pulse<R: Rng + ?Sized>(
    alpha_sq: f64,
    theta: Angle8,
    index: usize,
    rng: &mut R,
) -> Result<PulseRecord> {
    Ok(PulseRecord {
        k: sample_photon_number(alpha_sq, rng)?,
        theta,
        index,
    })
}

/// Poisson probability of exactly `k` photons.
pub fn poisson_pmf(alpha_sq: f64, k: u64) -> f64 {
    if alpha_sq == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
    (k as f64 * alpha_sq.ln() - alpha_sq - ln_fact).exp()
}

/// p₁ = 1 − e^{−|α|²}, the probability of at least one photon.
pub fn nonvacuum_prob(alpha_sq: f64) -> Result<f64> {
    check_intensity(alpha_sq)?;
    Ok(-(-alpha_sq).exp_m1())
}

/// p₂ = 1 − e^{−|α|²} − |α|²e^{−|α|²}, the probability of two or more photons.
pub fn multiphoton_prob(alpha_sq: f64) -> Result<f64> {
    check_intensity(alpha_sq)?;
    let x = alpha_sq;
    if x < 0.5 {
        // series avoids cancellation for small intensities
        let mut term = x * x / 2.0;
        let mut sum = 0.0;
        let mut k = 2.0;
        while term > sum * 1e-18 && term > 0.0 {
            sum += term;
            k += 1.0;
            term *= x / k;
        }
        Ok(sum * (-x).exp())
    } else {
        Ok(1.0 - (-x).exp() * (1.0 + x))
    }
}

pub fn server_view(record: &PulseRecord) -> LeakView {
    match record.k {
        0 => LeakView::Nothing,
        1 => LeakView::SingleQubit,
        _ => LeakView::FullLeak {
            theta: record.theta,
        },
    }
}

/// The qubit a single-photon pulse delivers, labelled `label`.
pub fn leak_qubit(record: &PulseRecord, label: Label) -> Option<PureState> {
    (record.k == 1).then(|| PureState::plus_theta(label, record.theta))
}
