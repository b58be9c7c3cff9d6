use crate::config::{check_at_least, check_positive, non_empty, one_or_many};
use crate::output::Table;
use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use scdqc::physics::{eta1_numeric, find_crossing, maximize_eta1, security_gap_sweep, DriveParams, EmissionModel};
use scdqc::pulses::{multiphoton_prob, nonvacuum_prob};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const SWEEP_COLUMNS: &[&str] = &[
    "alpha_sq",
    "eta1_max",
    "theta_star",
    "tau_star",
    "p1",
    "p2",
    "gap_emitter",
    "gap_ideal",
];
pub const OPT_COLUMNS: &[&str] = &[
    "alpha_sq",
    "eta1_star",
    "theta_star",
    "theta_star_over_pi",
    "tau_star",
    "eta1_ode",
    "p1",
    "p2",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModelChoice {
    /// Square pulse on a two-level emitter, optimised over pulse area
    #[default]
    TwoLevel,
    /// Idealised Λ emitter with η₁ = coupling · p₁
    IdealLambda,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Optimal single-photon probability and security gap across intensities.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSweepArgs {
    /// Smallest |α|² [default: 0.1]
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_min: Option<f64>,
    /// Largest |α|² [default: 10]
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_max: Option<f64>,
    /// Grid points [default: 100]
    #[arg(long)]
    pub points: Option<usize>,
    /// Grid spacing [default: linear]
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    /// Emission model [default: two_level]
    #[arg(long, value_enum)]
    pub model: Option<ModelChoice>,
    /// Coupling of the Λ model [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub coupling: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhysicsSweepParams {
    pub alpha_sq: Vec<f64>,
    pub model: EmissionModel,
}

impl PhysicsSweepArgs {
    pub fn resolve(self) -> Result<PhysicsSweepParams> {
        let lo = self.alpha_min.unwrap_or(0.1);
        let hi = self.alpha_max.unwrap_or(10.0);
        let points = self.points.unwrap_or(100);
        check_positive("alpha_min", lo)?;
        check_positive("alpha_max", hi)?;
        if hi < lo {
            bail!("invalid parameter alpha_max: must be at least alpha_min ({lo}), got {hi}");
        }
        check_at_least("points", points, 1)?;
        if points == 1 && hi != lo {
            bail!("invalid parameter points: a single point needs alpha_min = alpha_max");
        }
        let at = |i: usize| {
            if points == 1 {
                return lo;
            }
            let f = i as f64 / (points - 1) as f64;
            match self.spacing.unwrap_or_default() {
                Spacing::Linear => lo + f * (hi - lo),
                Spacing::Log => (lo.ln() + f * (hi.ln() - lo.ln())).exp(),
            }
        };
        let model = match self.model.unwrap_or_default() {
            ModelChoice::TwoLevel => {
                if self.coupling.is_some() {
                    bail!("invalid parameter coupling: only used by the ideal_lambda model");
                }
                EmissionModel::TwoLevel
            }
            ModelChoice::IdealLambda => {
                let coupling = self.coupling.unwrap_or(1.0);
                if !(coupling > 0.0 && coupling <= 1.0) {
                    bail!("invalid parameter coupling: must lie in (0, 1], got {coupling}");
                }
                EmissionModel::IdealLambda { coupling }
            }
        };
        Ok(PhysicsSweepParams {
            alpha_sq: (0..points).map(at).collect(),
            model,
        })
    }
}

pub fn run_sweep(p: &PhysicsSweepParams) -> Result<Table> {
    let mut table = Table::new(SWEEP_COLUMNS);
    for r in security_gap_sweep(&p.alpha_sq, p.model)? {
        table.push(vec![
            r.alpha_sq.into(),
            r.eta1_max.into(),
            r.theta_star.into(),
            r.tau_star.into(),
            r.p1.into(),
            r.p2.into(),
            r.gap_emitter.into(),
            r.gap_ideal.into(),
        ]);
    }
    Ok(table)
}

/// Pulse area maximising η₁ at given intensities, or the intensity where the
/// optimum meets the multi-photon probability.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsOptArgs {
    /// Intensities |α|² [default: 1]
    #[arg(long, allow_negative_numbers = true, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub alpha_sq: Option<Vec<f64>>,
    /// Report the crossing η₁,max = p₂ instead, searched in [1, 10]
    #[arg(long)]
    pub crossing: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhysicsOptParams {
    Intensities(Vec<f64>),
    Crossing,
}

impl PhysicsOptArgs {
    pub fn resolve(self) -> Result<PhysicsOptParams> {
        if self.crossing.unwrap_or(false) {
            if self.alpha_sq.is_some() {
                bail!("invalid parameter crossing: excludes alpha_sq");
            }
            return Ok(PhysicsOptParams::Crossing);
        }
        let a = non_empty("alpha_sq", self.alpha_sq.unwrap_or_else(|| vec![1.0]))?;
        for &x in &a {
            check_positive("alpha_sq", x)?;
        }
        Ok(PhysicsOptParams::Intensities(a))
    }
}

fn opt_row(table: &mut Table, alpha_sq: f64, eta1: f64, theta: f64, tau: f64) -> Result<()> {
    let ode = eta1_numeric(&DriveParams::unit(alpha_sq, theta)?, None)?;
    table.push(vec![
        alpha_sq.into(),
        eta1.into(),
        theta.into(),
        (theta / PI).into(),
        tau.into(),
        ode.into(),
        nonvacuum_prob(alpha_sq)?.into(),
        multiphoton_prob(alpha_sq)?.into(),
    ]);
    Ok(())
}

pub fn run_opt(p: &PhysicsOptParams) -> Result<Table> {
    let mut table = Table::new(OPT_COLUMNS);
    match p {
        PhysicsOptParams::Intensities(a) => {
            for &alpha_sq in a {
                let m = maximize_eta1(alpha_sq)?;
                opt_row(&mut table, alpha_sq, m.eta1, m.theta, m.tau)?;
            }
        }
        PhysicsOptParams::Crossing => {
            let c = find_crossing(1.0, 10.0)?;
            opt_row(&mut table, c.alpha_sq, c.eta1, c.theta, c.tau)?;
        }
    }
    Ok(table)
}
