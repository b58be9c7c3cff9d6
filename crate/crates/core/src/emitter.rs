//! Quantum emitter operations: rotated photon emission, Hadamard moves on
//! the spin, spin retirement, and emission success sampling.

use crate::error::{invalid, Result};
use crate::qstate::{Angle8, Basis, Gate, Label, PureState};
use crate::sampling::Chooser;

/// An emitter with single-photon generation probability `eta1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmitterModel {
    pub eta1: f64,
    pub id: Label,
}

impl EmitterModel {
    pub fn new(eta1: f64, id: Label) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta1) {
            return Err(invalid("eta1", format!("must lie in [0, 1], got {eta1}")));
        }
        Ok(Self { eta1, id })
    }
}

/// Emits a photon from `spin` driven at polarisation `theta`:
/// CNOT(spin → |0⟩) followed by RZ(θ) on the photon.
pub fn emit_photon(state: &mut PureState, spin: Label, theta: Angle8, new_photon: Label) -> Result<()> {
    state.position(spin)?;
    state.add_zero(new_photon)?;
    state.apply2(Gate::Cnot, spin, new_photon)?;
    if theta != Angle8::ZERO {
        state.apply1(Gate::Phase(theta), new_photon)?;
    }
    Ok(())
}

pub fn spin_hadamard(state: &mut PureState, spin: Label) -> Result<()> {
    state.apply1(Gate::H, spin)
}

/// Measures the spin in Z and applies Z^c to `correction_target`.
pub fn retire_spin<C: Chooser + ?Sized>(
    state: &mut PureState,
    spin: Label,
    correction_target: Label,
    rng: &mut C,
) -> Result<bool> {
    state.position(correction_target)?;
    let c = state.measure(spin, Basis::Z, rng)?;
    if c {
        state.apply1(Gate::Z, correction_target)?;
    }
    Ok(c)
}

pub fn sample_emission_success<C: Chooser + ?Sized>(model: &EmitterModel, rng: &mut C) -> bool {
    rng.bit(model.eta1)
}

/// Linear cluster on photons `Label(0..n)` from one emitter: emit, H,
/// repeated, then retire the spin.
pub fn generate_linear_cluster<C: Chooser + ?Sized>(n: usize, rng: &mut C) -> Result<PureState> {
    generate_grid_cluster(1, n, rng)
}

/// Grid cluster on photons `Label(r·cols + c)`, one emitter per row.
///
/// Each step links neighbouring spins with CZ, emits one photon per spin and
/// applies H to every spin; the spins are retired at the end.
pub fn generate_grid_cluster<C: Chooser + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut C,
) -> Result<PureState> {
    if rows == 0 || cols == 0 {
        return Err(invalid("grid", "rows and cols must be positive"));
    }
    let photon = |r: usize, c: usize| Label((r * cols + c) as u32);
    let spin = |r: usize| Label((rows * cols + r) as u32);
    let mut state = PureState::new();
    for r in 0..rows {
        state.add_plus(spin(r))?;
    }
    for c in 0..cols {
        for r in 1..rows {
            state.apply2(Gate::Cz, spin(r - 1), spin(r))?;
        }
        for r in 0..rows {
            emit_photon(&mut state, spin(r), Angle8::ZERO, photon(r, c))?;
            spin_hadamard(&mut state, spin(r))?;
        }
    }
    for r in 0..rows {
        retire_spin(&mut state, spin(r), photon(r, cols - 1), rng)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::fidelity_up_to_phase;
    use crate::sampling::{enumerate_branches, trial_rng};
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn plus_spin_gives_bell() {
        let mut s = PureState::new();
        s.add_plus(Label(0)).unwrap();
        emit_photon(&mut s, Label(0), Angle8::ZERO, Label(1)).unwrap();
        let a = s.amplitudes();
        assert!((a[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((a[3] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn down_spin_gets_no_phase() {
        for t in Angle8::all() {
            let mut s = PureState::new();
            s.add_zero(Label(0)).unwrap();
            emit_photon(&mut s, Label(0), t, Label(1)).unwrap();
            assert!((s.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn repeated_rotated_emission_accumulates_phase() {
        let (al, be) = (c(0.6, 0.0), c(0.0, 0.8));
        let mut s = PureState::qubit(Label(0), al, be).unwrap();
        emit_photon(&mut s, Label(0), Angle8::PI_4, Label(1)).unwrap();
        emit_photon(&mut s, Label(0), Angle8::PI_2, Label(2)).unwrap();
        let a = s.amplitudes();
        assert!((a[0] - al).norm() < 1e-15);
        assert!((a[7] - be * Angle8::new(3).phase()).norm() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn emission_then_hadamard_is_cz_pair() {
        let mut s = PureState::new();
        s.add_plus(Label(0)).unwrap();
        emit_photon(&mut s, Label(0), Angle8::ZERO, Label(1)).unwrap();
        spin_hadamard(&mut s, Label(0)).unwrap();
        let mut g = PureState::new();
        g.add_plus(Label(0)).unwrap();
        g.add_plus(Label(1)).unwrap();
        g.apply2(Gate::Cz, Label(0), Label(1)).unwrap();
        assert!((fidelity_up_to_phase(&s, &g).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hadamard_twice_is_identity() {
        let mut s = PureState::qubit(Label(0), c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let before = s.clone();
        spin_hadamard(&mut s, Label(0)).unwrap();
        spin_hadamard(&mut s, Label(0)).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn retire_product_spin_leaves_photon() {
        let mut s = PureState::new();
        s.add_zero(Label(0)).unwrap();
        s.add_plus(Label(1)).unwrap();
        let mut rng = trial_rng(0, 0);
        assert!(!retire_spin(&mut s, Label(0), Label(1), &mut rng).unwrap());
        let plus = PureState::plus_theta(Label(1), Angle8::ZERO);
        assert!((fidelity_up_to_phase(&s, &plus).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn emission_sampling_extremes() {
        let mut rng = trial_rng(2, 0);
        let always = EmitterModel::new(1.0, Label(0)).unwrap();
        let never = EmitterModel::new(0.0, Label(0)).unwrap();
        for _ in 0..1000 {
            assert!(sample_emission_success(&always, &mut rng));
            assert!(!sample_emission_success(&never, &mut rng));
        }
        assert!(EmitterModel::new(1.2, Label(0)).is_err());
        let m = EmitterModel::new(0.9, Label(0)).unwrap();
        let n = 100_000;
        let hits = (0..n).filter(|_| sample_emission_success(&m, &mut rng)).count() as f64 / n as f64;
        assert!((0.896..=0.904).contains(&hits));
    }

    #[test]
    fn linear_clusters_every_branch() {
        for n in 2..=5 {
            let g = crate::graphs::Graph::path(n);
            let target = crate::graphs::build_blind_graph_state(&g, &vec![Angle8::ZERO; n]).unwrap();
            for (_, s) in enumerate_branches(|ch| generate_linear_cluster(n, ch).unwrap()) {
                assert!((fidelity_up_to_phase(&s, &target).unwrap() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn three_by_four_grid_every_branch() {
        let g = crate::graphs::Graph::grid(3, 4);
        let target = crate::graphs::build_blind_graph_state(&g, &[Angle8::ZERO; 12]).unwrap();
        let branches = enumerate_branches(|ch| generate_grid_cluster(3, 4, ch).unwrap());
        assert_eq!(branches.len(), 8);
        for (_, s) in branches {
            assert!((fidelity_up_to_phase(&s, &target).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}
