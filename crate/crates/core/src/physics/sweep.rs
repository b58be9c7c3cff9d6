use super::{eta1_analytic, eta1_numeric, eta1_printed_formula, maximize_eta1, DriveParams};
use crate::error::{invalid, Result};
use crate::pulses::{multiphoton_prob, nonvacuum_prob};
use rayon::prelude::*;
use serde::Serialize;

/// Measured (|α|², η₁) pairs from a quantum-dot source, for annotation only.
pub const REFERENCE_POINTS: [(f64, f64); 2] = [(3.8, 0.62), (8.6, 0.81)];

/// How η₁ is obtained at each intensity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EmissionModel {
    /// Square pulse on a two-level emitter, maximised over pulse area.
    TwoLevel,
    /// Idealised Λ emitter: η₁ = coupling · p₁.
    IdealLambda { coupling: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha_sq: f64,
    pub eta1_max: f64,
    /// NaN for the Λ model
    pub theta_star: f64,
    /// NaN for the Λ model
    pub tau_star: f64,
    pub p1: f64,
    pub p2: f64,
    pub gap_emitter: f64,
    pub gap_ideal: f64,
}

fn row(alpha_sq: f64, model: EmissionModel) -> Result<SweepRow> {
    let p1 = nonvacuum_prob(alpha_sq)?;
    let p2 = multiphoton_prob(alpha_sq)?;
    let (eta1_max, theta_star, tau_star) = match model {
        EmissionModel::TwoLevel => {
            let m = maximize_eta1(alpha_sq)?;
            (m.eta1, m.theta, m.tau)
        }
        EmissionModel::IdealLambda { coupling } => {
            if !(coupling > 0.0 && coupling <= 1.0) {
                return Err(invalid("coupling", format!("must lie in (0, 1], got {coupling}")));
            }
            (coupling * p1, f64::NAN, f64::NAN)
        }
    };
    Ok(SweepRow {
        alpha_sq,
        eta1_max,
        theta_star,
        tau_star,
        p1,
        p2,
        gap_emitter: eta1_max - p2,
        gap_ideal: p1 - p2,
    })
}

/// One row per intensity, computed in parallel, in input order.
pub fn security_gap_sweep(alpha_values: &[f64], model: EmissionModel) -> Result<Vec<SweepRow>> {
    if alpha_values.is_empty() {
        return Err(invalid("alpha_range", "must not be empty"));
    }
    alpha_values.par_iter().map(|&a| row(a, model)).collect()
}

/// Point where the optimised two-level η₁ equals p₂.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub alpha_sq: f64,
    pub eta1: f64,
    pub theta: f64,
    pub tau: f64,
}

/// Bisects the sign change of η₁,max − p₂ inside [lo, hi].
pub fn find_crossing(lo: f64, hi: f64) -> Result<Crossing> {
    let gap = |a: f64| -> Result<f64> { Ok(maximize_eta1(a)?.eta1 - multiphoton_prob(a)?) };
    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (gap(a)?, gap(b)?);
    if ga.signum() == gb.signum() {
        return Err(invalid("range", format!("gap has the same sign at {lo} and {hi}")));
    }
    while b - a > 1e-9 {
        let m = 0.5 * (a + b);
        if gap(m)?.signum() == ga.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    let x = 0.5 * (a + b);
    let m = maximize_eta1(x)?;
    Ok(Crossing {
        alpha_sq: x,
        eta1: m.eta1,
        theta: m.theta,
        tau: m.tau,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiscrepancyRow {
    pub alpha_sq: f64,
    pub theta: f64,
    pub numeric: f64,
    pub analytic: f64,
    pub printed: f64,
}

/// Comparison of both closed forms against the ODE, which is taken as
/// ground truth.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub rows: Vec<DiscrepancyRow>,
    pub max_err_analytic: f64,
    pub max_err_printed: f64,
}

pub fn formula_discrepancy(alpha_values: &[f64], theta_values: &[f64]) -> Result<DiscrepancyReport> {
    let pts: Vec<(f64, f64)> = alpha_values
        .iter()
        .flat_map(|&a| theta_values.iter().map(move |&t| (a, t)))
        .collect();
    let rows = pts
        .par_iter()
        .map(|&(a, t)| {
            let p = DriveParams::unit(a, t)?;
            Ok(DiscrepancyRow {
                alpha_sq: a,
                theta: t,
                numeric: eta1_numeric(&p, None)?,
                analytic: eta1_analytic(&p),
                printed: eta1_printed_formula(&p),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = |f: fn(&DiscrepancyRow) -> f64| {
        rows.iter().map(|r| (f(r) - r.numeric).abs()).fold(0.0, f64::max)
    };
    Ok(DiscrepancyReport {
        max_err_analytic: max(|r| r.analytic),
        max_err_printed: max(|r| r.printed),
        rows,
    })
}
