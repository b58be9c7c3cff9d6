use super::{eta1_analytic, DriveParams};
use crate::error::Result;
use std::f64::consts::PI;

/// Maximiser of η₁ over the pulse area at fixed intensity (γ = 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eta1Max {
    pub eta1: f64,
    pub theta: f64,
    pub tau: f64,
}

/// Golden-section search for a maximum of `f` on [a, b] until the bracket
/// is narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

const GRID: usize = 400;

/// Scans Θ ∈ (0, 2π] on a 400-point grid, then refines with golden section
/// to |ΔΘ| < 1e−6.
pub fn maximize_eta1(alpha_sq: f64) -> Result<Eta1Max> {
    DriveParams::unit(alpha_sq, 1.0)?;
    let f = |theta: f64| eta1_analytic(&DriveParams { gamma: 1.0, alpha_sq, theta });
    let step = 2.0 * PI / GRID as f64;
    let best = (1..=GRID)
        .map(|k| (k, f(k as f64 * step)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid")
        .0;
    let lo = (best - 1) as f64 * step;
    let hi = ((best + 1).min(GRID)) as f64 * step;
    let (theta, eta1) = golden_section_max(f, lo.max(1e-12), hi, 1e-7);
    Ok(Eta1Max {
        eta1,
        theta,
        tau: theta * theta / (4.0 * alpha_sq),
    })
}
