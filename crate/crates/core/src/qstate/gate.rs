use super::Angle8;
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Gates supported by [`PureState::apply`](super::PureState::apply).
///
/// `Rz(θ)` is diag(1, e^{iθ}); `Phase` is the same gate restricted to Φ and
/// evaluated from an exact table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    Rz(f64),
    Phase(Angle8),
    Cz,
    Cnot,
}

pub(crate) type Mat2 = [[Complex64; 2]; 2];

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::Rz(_) => "RZ",
            Gate::Phase(_) => "Phase",
            Gate::Cz => "CZ",
            Gate::Cnot => "CNOT",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Gate::Cz | Gate::Cnot => 2,
            _ => 1,
        }
    }

    pub(crate) fn matrix(&self) -> Option<Mat2> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        let h = c(FRAC_1_SQRT_2, 0.0);
        Some(match *self {
            Gate::H => [[h, h], [h, -h]],
            Gate::X => [[o, l], [l, o]],
            Gate::Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
            Gate::Z => [[l, o], [o, -l]],
            Gate::Rz(t) => [[l, o], [o, Complex64::from_polar(1.0, t)]],
            Gate::Phase(a) => [[l, o], [o, a.phase()]],
            Gate::Cz | Gate::Cnot => return None,
        })
    }
}
