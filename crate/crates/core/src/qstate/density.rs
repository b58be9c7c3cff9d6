use super::{Label, PureState};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Maximum number of qubits the density oracle accepts.
pub const MAX_ORACLE_QUBITS: usize = 5;

/// Dense density operator on at most [`MAX_ORACLE_QUBITS`] qubits.
///
/// Also used unnormalized, as a weighted accumulator of pure branches.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOracle {
    labels: Vec<Label>,
    matrix: DMatrix<Complex64>,
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_ORACLE_QUBITS {
        Err(Error::RegisterFull {
            requested: n,
            cap: MAX_ORACLE_QUBITS,
        })
    } else {
        Ok(())
    }
}

impl DensityOracle {
    /// The zero operator over `labels`.
    pub fn zero(labels: Vec<Label>) -> Result<Self> {
        check_size(labels.len())?;
        let d = 1 << labels.len();
        Ok(Self {
            labels,
            matrix: DMatrix::zeros(d, d),
        })
    }

    pub fn from_pure(state: &PureState) -> Result<Self> {
        let mut out = Self::zero(state.labels().to_vec())?;
        out.accumulate(1.0, state)?;
        Ok(out)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Adds `weight · |ψ⟩⟨ψ|`.
    pub fn accumulate(&mut self, weight: f64, state: &PureState) -> Result<()> {
        let s = state.reordered(&self.labels)?;
        let a = s.amplitudes();
        for i in 0..a.len() {
            for j in 0..a.len() {
                self.matrix[(i, j)] += a[i] * a[j].conj() * weight;
            }
        }
        Ok(())
    }

    /// Adds `weight · other`.
    pub fn add_scaled(&mut self, weight: f64, other: &DensityOracle) -> Result<()> {
        let o = other.reordered(&self.labels)?;
        self.matrix += o.matrix * Complex64::new(weight, 0.0);
        Ok(())
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// The same operator with qubits stored in `order`.
    pub fn reordered(&self, order: &[Label]) -> Result<Self> {
        if order.len() != self.labels.len() {
            return Err(Error::LabelMismatch);
        }
        let mut old_pos = Vec::new();
        for l in order {
            old_pos.push(
                self.labels
                    .iter()
                    .position(|x| x == l)
                    .ok_or(Error::LabelMismatch)?,
            );
        }
        let d = self.matrix.nrows();
        let map: Vec<usize> = (0..d)
            .map(|i| {
                old_pos
                    .iter()
                    .enumerate()
                    .fold(0, |j, (k, &p)| j | (((i >> p) & 1) << k))
            })
            .collect();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(map[i], map[j])] = self.matrix[(i, j)];
            }
        }
        Ok(Self {
            labels: order.to_vec(),
            matrix: m,
        })
    }

    /// Traces out one qubit.
    pub fn partial_trace(&self, label: Label) -> Result<Self> {
        let pos = self
            .labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::UnknownLabel(label))?;
        let d = self.matrix.nrows() / 2;
        let ins = |j: usize, b: usize| ((j >> pos) << (pos + 1)) | (b << pos) | (j & ((1 << pos) - 1));
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.matrix[(ins(i, 0), ins(j, 0))] + self.matrix[(ins(i, 1), ins(j, 1))];
            }
        }
        let mut labels = self.labels.clone();
        labels.remove(pos);
        Ok(Self { labels, matrix: m })
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Checks Hermiticity, unit trace and positivity.
    pub fn validate(&self) -> Result<()> {
        let herm = (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-10 {
            return Err(Error::InvalidAmplitudes(format!("not Hermitian ({herm:e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidAmplitudes(format!("trace {tr}")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -1e-9 {
            return Err(Error::InvalidAmplitudes(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// ½‖A − B‖₁
    pub fn trace_distance(&self, other: &DensityOracle) -> Result<f64> {
        let o = other.reordered(&self.labels)?;
        let diff = Self {
            labels: self.labels.clone(),
            matrix: &self.matrix - &o.matrix,
        };
        Ok(0.5 * diff.eigenvalues().iter().map(|x| x.abs()).sum::<f64>())
    }

    /// Largest entrywise difference after aligning labels.
    pub fn max_abs_diff(&self, other: &DensityOracle) -> Result<f64> {
        let o = other.reordered(&self.labels)?;
        Ok((&self.matrix - &o.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{Angle8, Gate};
    use crate::sampling::enumerate_branches;

    #[test]
    fn plus_theta_average_is_maximally_mixed() {
        let mut acc = DensityOracle::zero(vec![Label(0)]).unwrap();
        for t in Angle8::all() {
            acc.accumulate(1.0 / 8.0, &PureState::plus_theta(Label(0), t)).unwrap();
        }
        let m = acc.matrix();
        assert!((m[(0, 0)].re - 0.5).abs() < 1e-12 && (m[(1, 1)].re - 0.5).abs() < 1e-12);
        assert!(m[(0, 1)].norm() < 1e-12);
        acc.validate().unwrap();
    }

    #[test]
    fn bell_partial_trace_and_distance() {
        let mut s = PureState::new();
        s.add_plus(Label(0)).unwrap();
        s.add_zero(Label(1)).unwrap();
        s.apply2(Gate::Cnot, Label(0), Label(1)).unwrap();
        let rho = DensityOracle::from_pure(&s).unwrap();
        rho.validate().unwrap();
        let red = rho.partial_trace(Label(1)).unwrap();
        let zero = DensityOracle::from_pure(&PureState::plus_theta(Label(0), Angle8::ZERO)).unwrap();
        let mut zero_ket = PureState::new();
        zero_ket.add_zero(Label(0)).unwrap();
        let z = DensityOracle::from_pure(&zero_ket).unwrap();
        assert!((red.trace_distance(&z).unwrap() - 0.5).abs() < 1e-12);
        assert!((red.trace_distance(&zero).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn discard_mixture_equals_partial_trace() {
        let mut s = PureState::new();
        s.add_qubit(Label(0), Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap();
        s.add_plus(Label(1)).unwrap();
        s.apply2(Gate::Cnot, Label(0), Label(1)).unwrap();
        s.apply1(Gate::Phase(Angle8::new(3)), Label(1)).unwrap();
        let expect = DensityOracle::from_pure(&s).unwrap().partial_trace(Label(1)).unwrap();
        let mut acc = DensityOracle::zero(vec![Label(0)]).unwrap();
        for (p, st) in enumerate_branches(|c| {
            let mut x = s.clone();
            x.discard(Label(1), c).unwrap();
            x
        }) {
            acc.accumulate(p, &st).unwrap();
        }
        assert!(acc.max_abs_diff(&expect).unwrap() < 1e-10);
    }

    #[test]
    fn size_cap() {
        let labels = (0..6).map(Label).collect();
        assert!(DensityOracle::zero(labels).is_err());
    }
}
