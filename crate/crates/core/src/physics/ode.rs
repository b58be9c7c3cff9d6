use super::DriveParams;
use crate::error::{invalid, Error, Result};

/// Default step 1e−4 / max(γ, Ω).
pub fn default_step(gamma: f64, omega: f64) -> f64 {
    1e-4 / gamma.max(omega)
}

type Rho = [f64; 4]; // ρ_gg, ρ_ee, Re ρ_eg, Im ρ_eg

fn deriv(r: &Rho, omega: f64, gamma: f64) -> Rho {
    let [gg, ee, cr, ci] = *r;
    [
        omega * ci + gamma * ee,
        -omega * ci - gamma * ee,
        -0.5 * gamma * cr,
        -0.5 * omega * (gg - ee) - 0.5 * gamma * ci,
    ]
}

/// Integrates dρ/dt = −i[Ωσx/2, ρ] + γ(σρσ† − ½{σ†σ, ρ}), σ = |g⟩⟨e|, from
/// the ground state over [0, τ] with classical RK4, returning ρ_ee(τ).
pub fn integrate_two_level(omega: f64, gamma: f64, tau: f64, dt: f64) -> Result<f64> {
    if !(omega >= 0.0 && gamma >= 0.0 && tau >= 0.0) {
        return Err(invalid("drive", "omega, gamma and tau must be non-negative"));
    }
    if !(dt > 0.0) {
        return Err(invalid("dt", "must be positive"));
    }
    let scale = gamma.max(omega);
    if scale > 0.0 {
        let limit = 1e-3 / scale;
        if dt > limit {
            return Err(Error::StepTooLarge { dt, limit });
        }
    }
    let steps = (tau / dt).ceil().max(1.0) as u64;
    let h = tau / steps as f64;
    let mut r: Rho = [1.0, 0.0, 0.0, 0.0];
    let axpy = |a: &Rho, k: &Rho, s: f64| -> Rho {
        [a[0] + s * k[0], a[1] + s * k[1], a[2] + s * k[2], a[3] + s * k[3]]
    };
    for _ in 0..steps {
        let k1 = deriv(&r, omega, gamma);
        let k2 = deriv(&axpy(&r, &k1, 0.5 * h), omega, gamma);
        let k3 = deriv(&axpy(&r, &k2, 0.5 * h), omega, gamma);
        let k4 = deriv(&axpy(&r, &k3, h), omega, gamma);
        for i in 0..4 {
            r[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(r[1])
}

/// Excited population after the pulse, by direct integration.
pub fn eta1_numeric(p: &DriveParams, dt: Option<f64>) -> Result<f64> {
    let om = p.omega();
    integrate_two_level(om, p.gamma, p.tau(), dt.unwrap_or_else(|| default_step(p.gamma, om)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn no_drive_stays_ground() {
        assert_eq!(integrate_two_level(0.0, 1.0, 3.0, 1e-4).unwrap(), 0.0);
    }

    #[test]
    fn closed_rabi_flop() {
        let p = integrate_two_level(1.0, 0.0, PI, 1e-4).unwrap();
        assert!((p - 1.0).abs() < 1e-10);
    }

    #[test]
    fn step_guard() {
        assert!(matches!(
            integrate_two_level(2.0, 1.0, 1.0, 1e-3),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn agrees_with_closed_form_at_endpoint() {
        let p = DriveParams::unit(1.0, 0.78 * PI).unwrap();
        let a = super::super::eta1_analytic(&p);
        let n = eta1_numeric(&p, None).unwrap();
        assert!((a - n).abs() < 1e-9, "{a} {n}");
    }
}
