use super::sub_seed;
use crate::config::{check_at_least, check_positive, check_prob, non_empty, one_or_many};
use crate::output::{Cell, Table};
use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use scdqc::adversary::{simulator2_error_rate, simulator3_error_rate};
use scdqc::protocols::{
    extender_target, protocol3_gadget, protocol5_postselected, CorrectionMode, GadgetOutcome, GadgetParams,
    HonestServer, Transcript,
};
use scdqc::pulses::multiphoton_prob;
use scdqc::qstate::{fidelity_up_to_phase, Angle8, Gate, Label, PureState};
use scdqc::sampling::{run_trials, Chooser, RateEstimate};
use scdqc::secbounds::{equilibrium_threshold, gadget_bounds, postselect_bounds};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;

pub const GADGET_COLUMNS: &[&str] = &[
    "protocol",
    "alpha_sq",
    "eta1",
    "n",
    "t",
    "trials",
    "aborts",
    "abort_rate",
    "eps_cor",
    "error_trials",
    "errors",
    "error_rate",
    "eps_sec",
    "eps_bound",
    "successes",
    "mean_fidelity",
    "min_fidelity",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum GadgetProtocol {
    /// Abort when too few photons are reported
    #[default]
    Threshold,
    /// Abort on any lost photon
    Postselected,
}

impl GadgetProtocol {
    fn name(self) -> &'static str {
        match self {
            GadgetProtocol::Threshold => "threshold",
            GadgetProtocol::Postselected => "postselected",
        }
    }
}

/// Monte Carlo runs of a single blind-extender gadget with an honest server,
/// plus the simulator Error rate against the worst-case server.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GadgetSimArgs {
    /// Gadget variant [default: threshold]
    #[arg(long, value_enum)]
    pub protocol: Option<GadgetProtocol>,
    /// Mean photon number per pulse [default: 0.5]
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_sq: Option<f64>,
    /// Single-photon emission probability [default: 0.9]
    #[arg(long, allow_negative_numbers = true)]
    pub eta1: Option<f64>,
    /// Pulses per gadget, one output row each [default: 100]
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub n: Option<Vec<usize>>,
    /// Abort threshold for the threshold gadget; only with a single n
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Target angle in units of π/4; uniform per trial when omitted
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<i64>,
    /// Honest runs per row [default: 10000]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Simulator runs per row for the Error rate, 0 to skip [default: trials]
    #[arg(long)]
    pub error_trials: Option<usize>,
    /// Number of transcripts to keep from the first row [default: 0]
    #[arg(long)]
    pub transcripts: Option<usize>,
    /// JSON-lines file receiving the kept transcripts
    #[arg(long)]
    pub transcript_out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GadgetSimParams {
    pub protocol: GadgetProtocol,
    pub alpha_sq: f64,
    pub eta1: f64,
    pub n: Vec<usize>,
    /// Threshold per entry of `n`; unused by the post-selected gadget.
    pub t: Vec<f64>,
    pub theta: Option<Angle8>,
    pub trials: usize,
    pub error_trials: usize,
    pub transcripts: usize,
    pub transcript_out: Option<PathBuf>,
}

impl GadgetSimArgs {
    pub fn resolve(self) -> Result<GadgetSimParams> {
        let protocol = self.protocol.unwrap_or_default();
        let alpha_sq = self.alpha_sq.unwrap_or(0.5);
        let eta1 = self.eta1.unwrap_or(0.9);
        check_positive("alpha_sq", alpha_sq)?;
        check_prob("eta1", eta1)?;
        let n = non_empty("n", self.n.unwrap_or_else(|| vec![100]))?;
        for &k in &n {
            check_at_least("n", k, 1)?;
        }
        let p2 = multiphoton_prob(alpha_sq)?;
        let t = match (self.t, protocol) {
            (Some(_), GadgetProtocol::Postselected) => {
                bail!("invalid parameter t: the post-selected gadget has no threshold")
            }
            (Some(_), _) if n.len() > 1 => bail!("invalid parameter t: only allowed with a single n"),
            (Some(t), _) => vec![t],
            (None, _) => n.iter().map(|&k| equilibrium_threshold(eta1, p2, k as u64)).collect(),
        };
        if protocol == GadgetProtocol::Threshold {
            for (&k, &tk) in n.iter().zip(&t) {
                GadgetParams::new(alpha_sq, k, tk, eta1)?;
            }
        }
        let trials = self.trials.unwrap_or(10_000);
        check_at_least("trials", trials, 1)?;
        let transcripts = self.transcripts.unwrap_or(0);
        if transcripts > trials {
            bail!("invalid parameter transcripts: must not exceed trials ({trials})");
        }
        if transcripts > 0 && self.transcript_out.is_none() {
            bail!("invalid parameter transcripts: needs transcript_out");
        }
        Ok(GadgetSimParams {
            protocol,
            alpha_sq,
            eta1,
            n,
            t,
            theta: self.theta.map(Angle8::new),
            trials,
            error_trials: self.error_trials.unwrap_or(trials),
            transcripts,
            transcript_out: self.transcript_out,
        })
    }
}

/// H|+_{π/4}⟩: unequal moduli and a complex relative phase, so that any
/// missing correction shows up in the fidelity.
fn input_spin() -> PureState {
    let mut s = PureState::plus_theta(Label(0), Angle8::PI_4);
    s.apply1(Gate::H, Label(0)).expect("label present");
    s
}

struct Trial {
    aborted: bool,
    fidelity: Option<f64>,
    transcript: Option<Transcript>,
}

fn trial(p: &GadgetSimParams, n: usize, t: f64, keep: bool, rng: &mut impl rand::Rng) -> scdqc::Result<Trial> {
    let theta = p.theta.unwrap_or_else(|| rng.angle());
    let spin = Label(0);
    let run = match p.protocol {
        GadgetProtocol::Threshold => {
            let params = GadgetParams::new(p.alpha_sq, n, t, p.eta1)?;
            protocol3_gadget(theta, &params, input_spin(), spin, &mut HonestServer, CorrectionMode::Immediate, rng)?
        }
        GadgetProtocol::Postselected => protocol5_postselected(
            theta,
            p.alpha_sq,
            n,
            p.eta1,
            input_spin(),
            spin,
            CorrectionMode::Immediate,
            rng,
        )?,
    };
    let fidelity = match &run.outcome {
        GadgetOutcome::Abort => None,
        GadgetOutcome::Success(s) => {
            let target = extender_target(&input_spin(), spin, theta, s.m_x, s.photon)?;
            Some(fidelity_up_to_phase(&s.state, &target)?)
        }
    };
    Ok(Trial {
        aborted: run.aborted(),
        fidelity,
        transcript: keep.then_some(run.transcript),
    })
}

pub fn run(p: &GadgetSimParams, seed: u64) -> Result<Table> {
    let mut table = Table::new(GADGET_COLUMNS);
    let mut kept: Vec<Transcript> = Vec::new();
    for (row, (&n, &t)) in p.n.iter().zip(&p.t).enumerate() {
        let keep = if row == 0 { p.transcripts } else { 0 };
        let trials = run_trials(sub_seed(seed, 2 * row as u64), p.trials, |rng, i| trial(p, n, t, i < keep, rng))
            .into_iter()
            .collect::<scdqc::Result<Vec<_>>>()?;
        let abort = RateEstimate::from_flags(trials.iter().map(|r| r.aborted));
        let fids: Vec<f64> = trials.iter().filter_map(|r| r.fidelity).collect();
        kept.extend(trials.into_iter().filter_map(|r| r.transcript));

        let error_seed = sub_seed(seed, 2 * row as u64 + 1);
        let (t_cell, eps_cor, eps_sec, eps, error) = match p.protocol {
            GadgetProtocol::Threshold => {
                let b = gadget_bounds(p.eta1, p.alpha_sq, n as u64, Some(t))?;
                let error = (p.error_trials > 0)
                    .then(|| simulator2_error_rate(n, p.alpha_sq, t, p.error_trials, error_seed))
                    .transpose()?;
                (Cell::Real(t), b.eps_cor, b.eps_sec, b.eps, error)
            }
            GadgetProtocol::Postselected => {
                let p2 = multiphoton_prob(p.alpha_sq)?;
                let ni = n as i32;
                let error = (p.error_trials > 0)
                    .then(|| simulator3_error_rate(n, p.alpha_sq, p.error_trials, error_seed))
                    .transpose()?;
                let eps = postselect_bounds(p.eta1, p.alpha_sq, n as u64)?;
                (Cell::Missing, 1.0 - p.eta1.powi(ni), p2.powi(ni), eps, error)
            }
        };
        let mean = (!fids.is_empty()).then(|| fids.iter().sum::<f64>() / fids.len() as f64);
        let min = fids.iter().copied().reduce(f64::min);
        table.push(vec![
            p.protocol.name().into(),
            p.alpha_sq.into(),
            p.eta1.into(),
            n.into(),
            t_cell,
            abort.trials.into(),
            abort.events.into(),
            abort.rate.into(),
            eps_cor.into(),
            p.error_trials.into(),
            error.as_ref().map_or(Cell::Missing, |e| e.events.into()),
            Cell::opt_real(error.as_ref().map(|e| e.rate)),
            eps_sec.into(),
            eps.into(),
            fids.len().into(),
            Cell::opt_real(mean),
            Cell::opt_real(min),
        ]);
    }
    if let Some(path) = &p.transcript_out {
        let mut f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        for tr in &kept {
            // one transcript per line
            writeln!(f, "{}", serde_json::to_string(tr)?)?;
        }
    }
    Ok(table)
}
