use super::graph::Graph;
use crate::error::{Error, Result};
use crate::qstate::Angle8;
use crate::sampling::Chooser;
use serde::{Deserialize, Serialize};

/// Largest graph accepted by [`enumerate_tests`].
pub const MAX_TEST_VERTICES: usize = 16;

/// Single-vertex Pauli factor of a test; Z never occurs in a valid test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
}

/// Product stabilizer ∏_{v : t_v = 1} S_v with S_v = X_v ∏_{w ~ v} Z_w.
///
/// The product can carry a sign −1 (e.g. the triangle's S₁S₂S₃ = −X⊗X⊗X);
/// `sign_flip` records it, and [`StabilizerTest::normalized_parity`] folds
/// it in so that an honest run always yields parity 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerTest {
    pub t: Vec<bool>,
    pub paulis: Vec<Pauli>,
    pub sign_flip: bool,
}

impl StabilizerTest {
    /// Measurement angle for vertex `v`: 0 for X, π/2 for Y, uniform over Φ
    /// for unconstrained vertices.
    pub fn angle_for<C: Chooser + ?Sized>(&self, v: usize, rng: &mut C) -> Angle8 {
        match self.paulis[v] {
            Pauli::X => Angle8::ZERO,
            Pauli::Y => Angle8::PI_2,
            Pauli::I => rng.angle(),
        }
    }

    /// Vertices on which the test acts non-trivially.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.paulis
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(v, _)| v)
    }

    /// Parity of the outcomes on the support, corrected by the sign.
    /// Outcome 0 is the +1 eigenvalue.
    pub fn normalized_parity(&self, outcomes: &[bool]) -> bool {
        self.support().fold(self.sign_flip, |acc, v| acc ^ outcomes[v])
    }
}

/// Every t ≠ 0 whose product stabilizer has no Z factor.
pub fn enumerate_tests(graph: &Graph) -> Result<Vec<StabilizerTest>> {
    let n = graph.len();
    if n > MAX_TEST_VERTICES {
        return Err(Error::GraphTooLarge {
            vertices: n,
            cap: MAX_TEST_VERTICES,
        });
    }
    let mut tests = Vec::new();
    for mask in 1u32..(1u32 << n) {
        // i^phase · ∏_q X^{x_q} Z^{z_q}
        let mut x = vec![false; n];
        let mut z = vec![false; n];
        let mut phase = 0u32;
        for v in (0..n).filter(|v| mask >> v & 1 == 1) {
            // moving Z_v of the accumulator past the new X_v costs a sign
            if z[v] {
                phase += 2;
            }
            x[v] ^= true;
            for &w in graph.neighbors(v) {
                z[w] ^= true;
            }
        }
        if (0..n).any(|q| z[q] && !x[q]) {
            continue;
        }
        let mut paulis = Vec::with_capacity(n);
        let mut ys = 0u32;
        for q in 0..n {
            paulis.push(match (x[q], z[q]) {
                (false, _) => Pauli::I,
                (true, false) => Pauli::X,
                (true, true) => {
                    ys += 1;
                    Pauli::Y
                }
            });
        }
        // XZ = −iY
        let total = (phase + 3 * ys) % 4;
        debug_assert!(total.is_multiple_of(2), "product of commuting stabilizers is Hermitian");
        tests.push(StabilizerTest {
            t: (0..n).map(|v| mask >> v & 1 == 1).collect(),
            paulis,
            sign_flip: total == 2,
        });
    }
    if tests.is_empty() {
        return Err(Error::NoValidTests);
    }
    Ok(tests)
}
