use super::gate::Mat2;
use super::{Angle8, Gate, Label};
use crate::error::{Error, Result};
use crate::sampling::Chooser;
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Maximum number of qubits in a state vector.
pub const MAX_QUBITS: usize = 20;

const NORM_TOL: f64 = 1e-10;

/// Single-qubit measurement basis.
///
/// `Rotated(δ)` measures in {|+_δ⟩, |−_δ⟩}, outcome 0 meaning |+_δ⟩; this is
/// the same as applying RZ(−δ) and measuring in the X basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Z,
    X,
    Rotated(Angle8),
}

/// State vector over labelled qubits. Bit `k` of an amplitude index is the
/// value of the qubit at position `k` of [`labels`](Self::labels).
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    labels: Vec<Label>,
    amps: Vec<Complex64>,
}

impl Default for PureState {
    fn default() -> Self {
        Self::new()
    }
}

#[inline]
fn insert_bit(j: usize, pos: usize) -> usize {
    let low = j & ((1 << pos) - 1);
    ((j >> pos) << (pos + 1)) | low
}

impl PureState {
    /// The empty register (one amplitude, equal to 1).
    pub fn new() -> Self {
        PureState {
            labels: Vec::new(),
            amps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Builds a state from explicit amplitudes; they must be normalized.
    pub fn from_amplitudes(labels: Vec<Label>, amps: Vec<Complex64>) -> Result<Self> {
        if labels.len() > MAX_QUBITS {
            return Err(Error::RegisterFull {
                requested: labels.len(),
                cap: MAX_QUBITS,
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(*l));
            }
        }
        if amps.len() != 1 << labels.len() {
            return Err(Error::InvalidAmplitudes(format!(
                "expected {} amplitudes, got {}",
                1usize << labels.len(),
                amps.len()
            )));
        }
        let s = Self { labels, amps };
        if (s.norm_sqr() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidAmplitudes(format!(
                "norm² is {}",
                s.norm_sqr()
            )));
        }
        Ok(s)
    }

    /// Single qubit a|0⟩ + b|1⟩ (normalized on construction).
    pub fn qubit(label: Label, a: Complex64, b: Complex64) -> Result<Self> {
        let mut s = Self::new();
        s.add_qubit(label, a, b)?;
        Ok(s)
    }

    /// |+_θ⟩ = (|0⟩ + e^{iθ}|1⟩)/√2
    pub fn plus_theta(label: Label, theta: Angle8) -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            labels: vec![label],
            amps: vec![h, theta.phase() * FRAC_1_SQRT_2],
        }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn contains(&self, label: Label) -> bool {
        self.labels.contains(&label)
    }

    /// A label not currently in use.
    pub fn fresh_label(&self) -> Label {
        Label(self.labels.iter().map(|l| l.0 + 1).max().unwrap_or(0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub(crate) fn position(&self, label: Label) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::UnknownLabel(label))
    }

    /// Appends qubit `label` in state a|0⟩ + b|1⟩ as the new highest bit.
    pub fn add_qubit(&mut self, label: Label, a: Complex64, b: Complex64) -> Result<()> {
        if self.contains(label) {
            return Err(Error::DuplicateLabel(label));
        }
        if self.labels.len() >= MAX_QUBITS {
            return Err(Error::RegisterFull {
                requested: self.labels.len() + 1,
                cap: MAX_QUBITS,
            });
        }
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n < 1e-12 {
            return Err(Error::InvalidAmplitudes("zero vector".into()));
        }
        let (a, b) = (a / n, b / n);
        let mut amps = Vec::with_capacity(self.amps.len() * 2);
        amps.extend(self.amps.iter().map(|x| x * a));
        amps.extend(self.amps.iter().map(|x| x * b));
        self.amps = amps;
        self.labels.push(label);
        Ok(())
    }

    pub fn add_zero(&mut self, label: Label) -> Result<()> {
        self.add_qubit(label, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn add_plus(&mut self, label: Label) -> Result<()> {
        self.add_qubit(label, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    }

    /// Tensor product; `other`'s qubits become the high bits.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        if let Some(l) = other.labels.iter().find(|l| self.contains(**l)) {
            return Err(Error::DuplicateLabel(*l));
        }
        let total = self.labels.len() + other.labels.len();
        if total > MAX_QUBITS {
            return Err(Error::RegisterFull {
                requested: total,
                cap: MAX_QUBITS,
            });
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for b in &other.amps {
            amps.extend(self.amps.iter().map(|a| a * b));
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Ok(PureState { labels, amps })
    }

    /// Applies `gate` to `targets` (control first for CNOT).
    pub fn apply(&mut self, gate: Gate, targets: &[Label]) -> Result<()> {
        if targets.len() != gate.arity() {
            return Err(Error::Arity {
                gate: gate.name(),
                expected: gate.arity(),
                got: targets.len(),
            });
        }
        match gate {
            Gate::Cz | Gate::Cnot => {
                if targets[0] == targets[1] {
                    return Err(Error::DuplicateTargets);
                }
                let a = 1usize << self.position(targets[0])?;
                let b = 1usize << self.position(targets[1])?;
                for i in 0..self.amps.len() {
                    if i & a == 0 {
                        continue;
                    }
                    if gate == Gate::Cz {
                        if i & b != 0 {
                            self.amps[i] = -self.amps[i];
                        }
                    } else if i & b == 0 {
                        self.amps.swap(i, i | b);
                    }
                }
            }
            g => {
                let pos = self.position(targets[0])?;
                self.apply_matrix(pos, &g.matrix().expect("single-qubit gate"));
            }
        }
        Ok(())
    }

    /// Applies a single-qubit gate to one label.
    pub fn apply1(&mut self, gate: Gate, target: Label) -> Result<()> {
        self.apply(gate, &[target])
    }

    /// Applies a two-qubit gate (control, target).
    pub fn apply2(&mut self, gate: Gate, a: Label, b: Label) -> Result<()> {
        self.apply(gate, &[a, b])
    }

    fn apply_matrix(&mut self, pos: usize, m: &Mat2) {
        let bit = 1usize << pos;
        let diag = m[0][1] == Complex64::new(0.0, 0.0) && m[1][0] == Complex64::new(0.0, 0.0);
        for j in 0..self.amps.len() / 2 {
            let i0 = insert_bit(j, pos);
            let i1 = i0 | bit;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            if diag {
                self.amps[i0] = m[0][0] * a0;
                self.amps[i1] = m[1][1] * a1;
            } else {
                self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Unnormalized post-measurement amplitudes with the measured qubit removed.
    fn branch(&self, pos: usize, basis: Basis, outcome: bool) -> Vec<Complex64> {
        let bit = 1usize << pos;
        let half = self.amps.len() / 2;
        let mut out = Vec::with_capacity(half);
        let coeff = match basis {
            Basis::Z => None,
            Basis::X => Some(Complex64::new(1.0, 0.0)),
            Basis::Rotated(d) => Some((-d).phase()),
        };
        for j in 0..half {
            let i0 = insert_bit(j, pos);
            let (a0, a1) = (self.amps[i0], self.amps[i0 | bit]);
            out.push(match coeff {
                None => {
                    if outcome {
                        a1
                    } else {
                        a0
                    }
                }
                Some(c) => {
                    let c = if outcome { -c } else { c };
                    (a0 + c * a1) * FRAC_1_SQRT_2
                }
            });
        }
        out
    }

    /// Born probability of `outcome` when measuring `label` in `basis`.
    pub fn probability(&self, label: Label, basis: Basis, outcome: bool) -> Result<f64> {
        let pos = self.position(label)?;
        Ok(self.branch(pos, basis, outcome).iter().map(|a| a.norm_sqr()).sum())
    }

    /// Projects onto a given outcome, removes the qubit and renormalizes.
    /// Returns the probability of the outcome.
    pub fn project(&mut self, label: Label, basis: Basis, outcome: bool) -> Result<f64> {
        let pos = self.position(label)?;
        let mut amps = self.branch(pos, basis, outcome);
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if p <= crate::sampling::ZERO_WEIGHT {
            return Err(Error::ZeroProbabilityBranch);
        }
        let s = 1.0 / p.sqrt();
        amps.iter_mut().for_each(|a| *a *= s);
        self.amps = amps;
        self.labels.remove(pos);
        Ok(p)
    }

    /// Born-rule measurement; the measured qubit is removed.
    pub fn measure<C: Chooser + ?Sized>(
        &mut self,
        label: Label,
        basis: Basis,
        rng: &mut C,
    ) -> Result<bool> {
        let p0 = self.probability(label, basis, false)?;
        let outcome = rng.choose(&[p0, 1.0 - p0]) == 1;
        self.project(label, basis, outcome)?;
        Ok(outcome)
    }

    /// Loses a qubit: Z-measures it and forgets the outcome.
    pub fn discard<C: Chooser + ?Sized>(&mut self, label: Label, rng: &mut C) -> Result<()> {
        self.measure(label, Basis::Z, rng).map(|_| ())
    }

    /// Renames one qubit.
    pub fn relabel(&mut self, from: Label, to: Label) -> Result<()> {
        let pos = self.position(from)?;
        if from != to && self.contains(to) {
            return Err(Error::DuplicateLabel(to));
        }
        self.labels[pos] = to;
        Ok(())
    }

    /// The same state with its qubits stored in `order`.
    pub fn reordered(&self, order: &[Label]) -> Result<PureState> {
        if order.len() != self.labels.len() {
            return Err(Error::LabelMismatch);
        }
        let mut old_pos = Vec::with_capacity(order.len());
        for (k, l) in order.iter().enumerate() {
            if order[..k].contains(l) {
                return Err(Error::DuplicateLabel(*l));
            }
            old_pos.push(self.position(*l).map_err(|_| Error::LabelMismatch)?);
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let mut j = 0usize;
            for (k, &p) in old_pos.iter().enumerate() {
                j |= ((i >> p) & 1) << k;
            }
            amps[j] = *a;
        }
        Ok(PureState {
            labels: order.to_vec(),
            amps,
        })
    }

    /// ⟨self|other⟩ after aligning label order.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        let o = other.reordered(&self.labels)?;
        Ok(self
            .amps
            .iter()
            .zip(&o.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// |⟨a|b⟩|², insensitive to global phase and to label order.
pub fn fidelity_up_to_phase(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}
