use crate::error::{invalid, Result};

/// Square drive of a two-level emitter.
///
/// Pulse width and Rabi frequency follow from the intensity and area:
/// τ = Θ²/(4γ|α|²) and Ω = 4γ|α|²/Θ, so Ωτ = Θ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveParams {
    pub gamma: f64,
    pub alpha_sq: f64,
    pub theta: f64,
}

impl DriveParams {
    pub fn new(gamma: f64, alpha_sq: f64, theta: f64) -> Result<Self> {
        for (name, v) in [("gamma", gamma), ("alpha_sq", alpha_sq), ("theta", theta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        Ok(Self {
            gamma,
            alpha_sq,
            theta,
        })
    }

    /// γ = 1 units.
    pub fn unit(alpha_sq: f64, theta: f64) -> Result<Self> {
        Self::new(1.0, alpha_sq, theta)
    }

    pub fn tau(&self) -> f64 {
        self.theta * self.theta / (4.0 * self.gamma * self.alpha_sq)
    }

    pub fn omega(&self) -> f64 {
        4.0 * self.gamma * self.alpha_sq / self.theta
    }
}

/// Excited population at the end of the pulse, damped Rabi closed form:
///
/// η₁ = Ω²/(γ² + 2Ω²) · [1 − (cos λτ + 3γ/(4λ) · sin λτ) e^{−3γτ/4}],
/// λ = √(Ω² − γ²/16), continued to cosh/sinh when Ω < γ/4.
pub fn eta1_analytic(p: &DriveParams) -> f64 {
    let (g, om, tau) = (p.gamma, p.omega(), p.tau());
    let disc = om * om - g * g / 16.0;
    let (c, s_over_l) = if disc > 0.0 {
        let l = disc.sqrt();
        ((l * tau).cos(), (l * tau).sin() / l)
    } else if disc < 0.0 {
        let k = (-disc).sqrt();
        ((k * tau).cosh(), (k * tau).sinh() / k)
    } else {
        (1.0, tau)
    };
    let osc = (c + 0.75 * g * s_over_l) * (-0.75 * g * tau).exp();
    om * om / (g * g + 2.0 * om * om) * (1.0 - osc)
}

/// The alternative expression with Ω′ = √((γ/4)² + Ω²) and a 3γ/Ω′ sine
/// coefficient, kept for comparison against the ODE. It does not solve the
/// master equation; see [`formula_discrepancy`](super::formula_discrepancy).
pub fn eta1_printed_formula(p: &DriveParams) -> f64 {
    let (g, om, tau) = (p.gamma, p.omega(), p.tau());
    let op = (g * g / 16.0 + om * om).sqrt();
    let bracket = g * g
        + om * om
        + om * om * ((tau * op).cos() + 3.0 * g / op * (tau * op).sin()) * (-0.75 * g * tau).exp();
    1.0 - bracket / (g * g + 2.0 * om * om)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn derived_quantities() {
        let p = DriveParams::unit(1.0, 0.78 * PI).unwrap();
        assert!((p.tau() - 1.5011).abs() < 1e-4);
        assert!((p.omega() - 1.6324).abs() < 1e-4);
        assert!((p.tau() * p.omega() - p.theta).abs() < 1e-14);
        assert!(DriveParams::unit(-1.0, 1.0).is_err());
        assert!(DriveParams::unit(1.0, 0.0).is_err());
    }

    #[test]
    fn endpoint_near_048() {
        let p = DriveParams::unit(1.0, 0.78 * PI).unwrap();
        assert!((eta1_analytic(&p) - 0.48).abs() < 0.005);
    }

    #[test]
    fn pulse_area_limit() {
        let p = DriveParams::unit(100.0, PI).unwrap();
        assert!((eta1_analytic(&p) - 1.0).abs() < 0.03);
    }

    #[test]
    fn weak_drive_vanishes() {
        let p = DriveParams::unit(1.0, 1e-4).unwrap();
        assert!(eta1_analytic(&p) < 1e-8);
    }

    #[test]
    fn overdamped_branch_is_continuous() {
        // Ω = γ/4 when 16|α|² = Θ
        let at = |d: f64| eta1_analytic(&DriveParams::unit(0.1, 1.6 + d).unwrap());
        assert!((at(1e-9) - at(0.0)).abs() < 1e-7);
        assert!((at(-1e-9) - at(0.0)).abs() < 1e-7);
    }

    #[test]
    fn printed_formula_misses_endpoint() {
        let p = DriveParams::unit(1.0, 0.78 * PI).unwrap();
        assert!((eta1_printed_formula(&p) - 0.376).abs() < 0.005);
    }
}
