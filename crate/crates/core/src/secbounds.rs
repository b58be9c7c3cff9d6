//! Closed-form correctness and security bounds for the gadget, the
//! post-selected variant, and their composition into delegated protocols.
//!
//! Exponents are carried in the log domain (`ln_*` fields) so reports stay
//! meaningful when ν·n is far beyond the range of `f64::exp`.

use crate::error::{invalid, Error, Result};
use crate::pulses::multiphoton_prob;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Pr[X ≤ k] for k ≤ np
    Lower,
    /// Pr[X ≥ k] for k ≥ np
    Upper,
}

/// ln of the Hoeffding bound exp(−2(p − k/n)²n).
pub fn ln_hoeffding_tail(n: u64, p: f64, k: f64, side: Side) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let nf = n as f64;
    let np = nf * p;
    match side {
        Side::Lower if k > np => Err(Error::HoeffdingSide {
            side: "lower",
            relation: "<=",
            k,
            np,
        }),
        Side::Upper if k < np => Err(Error::HoeffdingSide {
            side: "upper",
            relation: ">=",
            k,
            np,
        }),
        _ => {
            let d = p - k / nf;
            Ok(-2.0 * d * d * nf)
        }
    }
}

/// Hoeffding tail bound exp(−2(p − k/n)²n) for Bin(n, p).
pub fn hoeffding_tail(n: u64, p: f64, k: f64, side: Side) -> Result<f64> {
    ln_hoeffding_tail(n, p, k, side).map(f64::exp)
}

/// Bounds for the GHZ gadget at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub eta1: f64,
    pub alpha_sq: f64,
    pub p2: f64,
    pub n: u64,
    pub t: f64,
    pub nu: f64,
    pub eps_cor: f64,
    pub eps_sec: f64,
    pub eps: f64,
    pub ln_eps_cor: f64,
    pub ln_eps_sec: f64,
    pub ln_eps: f64,
}

/// The threshold (η₁ + p₂)/2 · n at which both errors coincide.
pub fn equilibrium_threshold(eta1: f64, p2: f64, n: u64) -> f64 {
    0.5 * (eta1 + p2) * n as f64
}

/// ν = (η₁ − p₂)²/2
pub fn nu(eta1: f64, p2: f64) -> f64 {
    0.5 * (eta1 - p2) * (eta1 - p2)
}

fn check_prob(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(name, format!("must lie in [0, 1], got {v}")))
    }
}

/// ε_cor = exp(−2(η₁ − t/n)²n) and ε_sec = exp(−2(t/n − p₂)²n).
///
/// Without `t` the equilibrium threshold is used, which needs η₁ ≥ p₂. An
/// explicit `t` outside [p₂n, η₁n] makes the corresponding bound vacuous (1).
pub fn gadget_bounds(eta1: f64, alpha_sq: f64, n: u64, t: Option<f64>) -> Result<BoundReport> {
    check_prob("eta1", eta1)?;
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let p2 = multiphoton_prob(alpha_sq)?;
    let t = match t {
        Some(t) if !(0.0..=n as f64).contains(&t) => {
            return Err(invalid("t", format!("must lie in [0, n], got {t}")))
        }
        Some(t) => t,
        None if eta1 < p2 => return Err(Error::NoPositiveGap { eta1, p2 }),
        None => equilibrium_threshold(eta1, p2, n),
    };
    let ln_eps_cor = ln_hoeffding_tail(n, eta1, t, Side::Lower).unwrap_or(0.0);
    let ln_eps_sec = ln_hoeffding_tail(n, p2, t, Side::Upper).unwrap_or(0.0);
    let ln_eps = ln_eps_cor.max(ln_eps_sec);
    Ok(BoundReport {
        eta1,
        alpha_sq,
        p2,
        n,
        t,
        nu: nu(eta1, p2),
        eps_cor: ln_eps_cor.exp(),
        eps_sec: ln_eps_sec.exp(),
        eps: ln_eps.exp(),
        ln_eps_cor,
        ln_eps_sec,
        ln_eps,
    })
}

/// Composition over a whole delegated computation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComposedBounds {
    /// |V|·ε, capped at 1
    pub bdqc: f64,
    /// N·|V|·ε + ε_S, capped at 1; `eps_s` is supplied by the caller
    pub sdqc: Option<f64>,
}

pub fn composed_bounds(
    report: &BoundReport,
    vertices: u64,
    repetitions: Option<u64>,
    eps_s: Option<f64>,
) -> Result<ComposedBounds> {
    if vertices == 0 {
        return Err(invalid("vertices", "must be at least 1"));
    }
    let ln_v = (vertices as f64).ln() + report.ln_eps;
    let bdqc = ln_v.exp().min(1.0);
    let sdqc = match (repetitions, eps_s) {
        (Some(nr), Some(es)) => {
            check_prob("eps_s", es)?;
            Some((((nr as f64).ln() + ln_v).exp() + es).min(1.0))
        }
        (None, None) => None,
        _ => return Err(invalid("sdqc", "repetitions and eps_s must be given together")),
    };
    Ok(ComposedBounds { bdqc, sdqc })
}

/// ε′ = max(1 − η₁ⁿ, p₂ⁿ) for the post-selected gadget.
pub fn postselect_bounds(eta1: f64, alpha_sq: f64, n: u64) -> Result<f64> {
    check_prob("eta1", eta1)?;
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let p2 = multiphoton_prob(alpha_sq)?;
    let ni = n.min(i32::MAX as u64) as i32;
    Ok((1.0 - eta1.powi(ni)).max(p2.powi(ni)))
}

/// Smallest n with exp(−νn) ≤ `target_eps`.
pub fn required_pulses_for_nu(target_eps: f64, nu: f64) -> Result<u64> {
    if !(target_eps > 0.0 && target_eps < 1.0) {
        return Err(invalid("target_eps", format!("must lie in (0, 1), got {target_eps}")));
    }
    if nu <= 0.0 || !nu.is_finite() {
        return Err(invalid("nu", "must be positive"));
    }
    let ln_target = target_eps.ln();
    let mut n = (-ln_target / nu).ceil().max(1.0) as u64;
    // guard the ceiling against rounding in either direction
    while n > 1 && -nu * (n - 1) as f64 <= ln_target {
        n -= 1;
    }
    while -nu * n as f64 > ln_target {
        n += 1;
    }
    Ok(n)
}

/// Smallest pulse count whose equilibrium bound meets `target_eps`.
pub fn required_pulses(target_eps: f64, eta1: f64, alpha_sq: f64) -> Result<u64> {
    check_prob("eta1", eta1)?;
    let p2 = multiphoton_prob(alpha_sq)?;
    if eta1 <= p2 {
        return Err(Error::NoPositiveGap { eta1, p2 });
    }
    required_pulses_for_nu(target_eps, nu(eta1, p2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hoeffding_examples() {
        assert_eq!(hoeffding_tail(100, 0.5, 50.0, Side::Lower).unwrap(), 1.0);
        assert!((hoeffding_tail(100, 0.5, 40.0, Side::Lower).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert!(matches!(
            hoeffding_tail(100, 0.5, 60.0, Side::Lower),
            Err(Error::HoeffdingSide { .. })
        ));
        assert!(hoeffding_tail(100, 0.5, 40.0, Side::Upper).is_err());
    }

    fn binomial_cdf(n: u64, p: f64, k: u64) -> f64 {
        let mut c = 1.0f64;
        let mut total = 0.0;
        for i in 0..=k {
            if i > 0 {
                c *= (n - i + 1) as f64 / i as f64;
            }
            total += c * p.powi(i as i32) * (1.0 - p).powi((n - i) as i32);
        }
        total
    }

    #[test]
    fn hoeffding_dominates_exact_binomial() {
        let exact = binomial_cdf(100, 0.5, 40);
        assert!((exact - 0.0284).abs() < 1e-3);
        assert!(exact <= hoeffding_tail(100, 0.5, 40.0, Side::Lower).unwrap());
        for k in 0..=50u64 {
            assert!(binomial_cdf(100, 0.5, k) <= hoeffding_tail(100, 0.5, k as f64, Side::Lower).unwrap() + 1e-15);
        }
    }

    #[test]
    fn reference_point() {
        let r = gadget_bounds(0.9, 0.5, 100, None).unwrap();
        assert!((r.p2 - 0.090204).abs() < 1e-6);
        assert!((r.t - 49.51).abs() < 1e-3);
        assert!((r.nu - 0.327885).abs() < 1e-6);
        assert!((r.eps / 5.7e-15 - 1.0).abs() < 0.03, "{}", r.eps);
        assert!((r.eps_cor - r.eps_sec).abs() < 1e-12);
        assert!((r.ln_eps + r.nu * 100.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_gap() {
        let p2 = multiphoton_prob(1.0).unwrap();
        let r = gadget_bounds(p2, 1.0, 100, None).unwrap();
        assert_eq!(r.eps, 1.0);
        assert!(matches!(gadget_bounds(0.1, 2.0, 10, None), Err(Error::NoPositiveGap { .. })));
    }

    #[test]
    fn crossing_has_negligible_nu() {
        let p2 = multiphoton_prob(2.5).unwrap();
        assert!((nu(0.71, p2) - 3.65e-6).abs() < 1e-7);
    }

    #[test]
    fn explicit_threshold_outside_window_is_vacuous() {
        let r = gadget_bounds(0.9, 0.5, 100, Some(95.0)).unwrap();
        assert_eq!(r.eps_cor, 1.0);
        assert!(r.eps_sec < 1e-30);
        let r = gadget_bounds(0.9, 0.5, 100, Some(5.0)).unwrap();
        assert_eq!(r.eps_sec, 1.0);
        assert!(gadget_bounds(0.9, 0.5, 100, Some(101.0)).is_err());
    }

    #[test]
    fn composition_examples() {
        let r = gadget_bounds(0.9, 0.5, 100, None).unwrap();
        let c1 = composed_bounds(&r, 1, None, None).unwrap();
        assert!((c1.bdqc / r.eps - 1.0).abs() < 1e-12);
        let c = composed_bounds(&r, 50, Some(100), Some(1e-6)).unwrap();
        assert!((c.bdqc / 2.85e-13 - 1.0).abs() < 0.03, "{}", c.bdqc);
        assert!((c.sdqc.unwrap() - 1.0e-6).abs() < 1e-10);
        assert!(composed_bounds(&r, 0, None, None).is_err());
        assert!(composed_bounds(&r, 5, Some(3), None).is_err());
    }

    #[test]
    fn postselect_examples() {
        assert!((postselect_bounds(0.9, 0.5, 10).unwrap() - (1.0 - 0.9f64.powi(10))).abs() < 1e-15);
        assert!((postselect_bounds(0.9, 0.5, 2).unwrap() - 0.19).abs() < 1e-12);
        assert!(postselect_bounds(1.0, 1e-9, 5).unwrap() < 1e-40);
    }

    #[test]
    fn required_pulses_examples() {
        assert_eq!(required_pulses_for_nu(1e-9, 0.3279).unwrap(), 64);
        assert_eq!(required_pulses_for_nu(0.5, std::f64::consts::LN_2).unwrap(), 1);
        assert!(required_pulses(1e-9, 0.1, 2.0).is_err());
        assert!(required_pulses_for_nu(1.5, 0.3).is_err());
    }

    #[test]
    fn log_domain_survives_underflow() {
        let r = gadget_bounds(0.99, 0.01, 1_000_000, None).unwrap();
        assert_eq!(r.eps, 0.0);
        assert!(r.ln_eps < -1e5);
    }
}
