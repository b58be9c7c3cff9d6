use crate::config::{check_at_least, check_positive, check_prob, non_empty, one_or_many};
use crate::output::{Cell, Table};
use anyhow::{bail, Result};
use clap::Args;
use scdqc::secbounds::{composed_bounds, gadget_bounds};
use serde::{Deserialize, Serialize};

pub const BOUNDS_COLUMNS: &[&str] = &[
    "alpha_sq", "eta1", "p2", "n", "t", "nu", "eps_cor", "eps_sec", "eps", "bdqc", "sdqc",
];

/// Threshold-gadget bounds over the grid eta1 × alpha_sq × n.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsArgs {
    /// Mean photon number |α|² per pulse [default: 0.5]
    #[arg(long, allow_negative_numbers = true, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub alpha_sq: Option<Vec<f64>>,
    /// Single-photon emission probability η₁ [default: 0.9]
    #[arg(long, allow_negative_numbers = true, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub eta1: Option<Vec<f64>>,
    /// Pulses per gadget [default: 100]
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub n: Option<Vec<u64>>,
    /// Abort threshold; the equilibrium (η₁ + p₂)/2 · n when omitted
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Vertices of the delegated graph, for the composed bound [default: 1]
    #[arg(long)]
    pub vertices: Option<u64>,
    /// Repetitions N of the verifiable protocol; needs --eps-s
    #[arg(long)]
    pub repetitions: Option<u64>,
    /// Soundness error of the verifiable protocol with ideal resources
    #[arg(long, allow_negative_numbers = true)]
    pub eps_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundsParams {
    pub alpha_sq: Vec<f64>,
    pub eta1: Vec<f64>,
    pub n: Vec<u64>,
    pub t: Option<f64>,
    pub vertices: u64,
    pub repetitions: Option<u64>,
    pub eps_s: Option<f64>,
}

impl BoundsArgs {
    pub fn resolve(self) -> Result<BoundsParams> {
        let alpha_sq = non_empty("alpha_sq", self.alpha_sq.unwrap_or_else(|| vec![0.5]))?;
        let eta1 = non_empty("eta1", self.eta1.unwrap_or_else(|| vec![0.9]))?;
        let n = non_empty("n", self.n.unwrap_or_else(|| vec![100]))?;
        for &a in &alpha_sq {
            check_positive("alpha_sq", a)?;
        }
        for &e in &eta1 {
            check_prob("eta1", e)?;
        }
        for &k in &n {
            check_at_least("n", k, 1)?;
        }
        let vertices = self.vertices.unwrap_or(1);
        check_at_least("vertices", vertices, 1)?;
        if self.repetitions.is_some() != self.eps_s.is_some() {
            bail!("invalid parameter repetitions: must be given together with eps_s");
        }
        if let Some(e) = self.eps_s {
            check_prob("eps_s", e)?;
        }
        Ok(BoundsParams {
            alpha_sq,
            eta1,
            n,
            t: self.t,
            vertices,
            repetitions: self.repetitions,
            eps_s: self.eps_s,
        })
    }
}

pub fn run(p: &BoundsParams) -> Result<Table> {
    let mut table = Table::new(BOUNDS_COLUMNS);
    for &eta1 in &p.eta1 {
        for &alpha_sq in &p.alpha_sq {
            for &n in &p.n {
                let r = gadget_bounds(eta1, alpha_sq, n, p.t)?;
                let c = composed_bounds(&r, p.vertices, p.repetitions, p.eps_s)?;
                table.push(vec![
                    r.alpha_sq.into(),
                    r.eta1.into(),
                    r.p2.into(),
                    r.n.into(),
                    r.t.into(),
                    r.nu.into(),
                    r.eps_cor.into(),
                    r.eps_sec.into(),
                    r.eps.into(),
                    c.bdqc.into(),
                    Cell::opt_real(c.sdqc),
                ]);
            }
        }
    }
    Ok(table)
}
