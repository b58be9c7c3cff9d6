use super::gadget::{
    real_gadget_view, real_postselected_view, simulator2_gadget, simulator2_with_counts, simulator3_postselected,
    simulator3_with_counts, ClassicalView, GadgetView, SetPolicy, SimOutcome,
};
use super::view::{total_variation, ViewDistribution};
use crate::error::{invalid, Result};
use crate::qstate::{Angle8, Label, PureState};
use crate::sampling::{enumerate_branches, run_trials, RateEstimate};
use serde::Serialize;
use std::collections::BTreeMap;

/// Largest pulse train enumerated exhaustively.
pub const MAX_ENUMERATED_PULSES: usize = 3;

/// Never aborts: |S| ≤ t is false for every S.
const NO_ABORT: f64 = -1.0;

fn check_small(counts: &[u64]) -> Result<()> {
    if counts.is_empty() || counts.len() > MAX_ENUMERATED_PULSES {
        return Err(invalid("k", format!("between 1 and {MAX_ENUMERATED_PULSES} pulses")));
    }
    Ok(())
}

fn oracle(theta: Angle8) -> PureState {
    PureState::plus_theta(Label(u32::MAX), theta)
}

fn add_view(dist: &mut ViewDistribution<ClassicalView>, p: f64, view: GadgetView) -> Result<()> {
    let state = view.joint_state()?;
    dist.add(view.classical, p, &state)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlindnessReport {
    pub counts: Vec<u64>,
    pub reported: Vec<usize>,
    /// Largest TV distance between the classical server views of two
    /// client angles.
    pub max_tv: f64,
}

/// Exact classical view distribution of the threshold gadget for angle θ
/// with photon numbers `counts` and reported set `reported` (no abort).
pub fn classical_view_distribution(
    theta: Angle8,
    counts: &[u64],
    reported: &[usize],
) -> Result<BTreeMap<ClassicalView, f64>> {
    check_small(counts)?;
    let policy = SetPolicy::Fixed(reported.to_vec());
    let mut out = BTreeMap::new();
    for (p, v) in enumerate_branches(|c| real_gadget_view(theta, counts, &policy, NO_ABORT, c)) {
        *out.entry(v?.classical).or_insert(0.0) += p;
    }
    Ok(out)
}

/// Max over pairs of client angles of the TV distance between the classical
/// views (leaks, S, θ̄, m_x). Probabilities are dyadic, so zero is exact.
pub fn blindness_check(counts: &[u64], reported: &[usize]) -> Result<BlindnessReport> {
    let dists = Angle8::all()
        .map(|th| classical_view_distribution(th, counts, reported))
        .collect::<Result<Vec<_>>>()?;
    let mut max_tv: f64 = 0.0;
    for i in 0..dists.len() {
        for j in i + 1..dists.len() {
            max_tv = max_tv.max(total_variation(&dists[i], &dists[j]));
        }
    }
    Ok(BlindnessReport {
        counts: counts.to_vec(),
        reported: reported.to_vec(),
        max_tv,
    })
}

/// Every photon-number pattern in {0, 1, 2}ⁿ (2 standing for any k ≥ 2).
pub fn count_patterns(n: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..3u64).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

/// Every subset of 1..=n, as sorted index lists.
pub fn index_subsets(n: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .map(|m| (1..=n).filter(|&i| m >> (i - 1) & 1 == 1).collect())
        .collect()
}

/// [`blindness_check`] for every pattern and every S on n pulses.
pub fn blindness_table(n: usize) -> Result<Vec<BlindnessReport>> {
    let mut out = Vec::new();
    for k in count_patterns(n) {
        for s in index_subsets(n) {
            out.push(blindness_check(&k, &s)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub counts: Vec<u64>,
    pub reported: Vec<usize>,
    /// The simulator raises Error for this case; no comparison is made.
    pub error: bool,
    /// Max over θ of the trace distance between the real and simulated
    /// classical-quantum views.
    pub max_trace_distance: f64,
}

fn compare<R, S>(counts: &[u64], reported: &[usize], real: R, sim: S) -> Result<EquivalenceReport>
where
    R: Fn(Angle8) -> Result<ViewDistribution<ClassicalView>>,
    S: Fn(Angle8) -> Result<Option<ViewDistribution<ClassicalView>>>,
{
    let mut report = EquivalenceReport {
        counts: counts.to_vec(),
        reported: reported.to_vec(),
        error: false,
        max_trace_distance: 0.0,
    };
    for theta in Angle8::all() {
        let Some(s) = sim(theta)? else {
            report.error = true;
            report.max_trace_distance = 0.0;
            return Ok(report);
        };
        let d = real(theta)?.trace_distance(&s)?;
        report.max_trace_distance = report.max_trace_distance.max(d);
    }
    Ok(report)
}

fn sim_distribution<F>(mut run: F) -> Result<Option<ViewDistribution<ClassicalView>>>
where
    F: FnMut(&mut crate::sampling::PathChooser) -> Result<SimOutcome>,
{
    let mut dist = ViewDistribution::new();
    for (p, out) in enumerate_branches(&mut run) {
        match out? {
            SimOutcome::Error => return Ok(None),
            SimOutcome::View(v) => add_view(&mut dist, p, v)?,
        }
    }
    Ok(Some(dist))
}

/// Real threshold-gadget view against its simulator, exactly, for every θ.
/// `t` decides abort as in the protocol.
pub fn simulator2_equivalence(counts: &[u64], reported: &[usize], t: f64) -> Result<EquivalenceReport> {
    check_small(counts)?;
    let policy = SetPolicy::Fixed(reported.to_vec());
    compare(
        counts,
        reported,
        |theta| {
            let mut dist = ViewDistribution::new();
            for (p, v) in enumerate_branches(|c| real_gadget_view(theta, counts, &policy, t, c)) {
                add_view(&mut dist, p, v?)?;
            }
            Ok(dist)
        },
        |theta| sim_distribution(|c| simulator2_with_counts(counts, &policy, t, oracle(theta), c)),
    )
}

/// Real post-selected view against its simulator, exactly, for every θ.
pub fn simulator3_equivalence(counts: &[u64]) -> Result<EquivalenceReport> {
    check_small(counts)?;
    compare(
        counts,
        &[],
        |theta| {
            let mut dist = ViewDistribution::new();
            for (p, v) in enumerate_branches(|c| real_postselected_view(theta, counts, c)) {
                add_view(&mut dist, p, v?)?;
            }
            Ok(dist)
        },
        |theta| sim_distribution(|c| simulator3_with_counts(counts, oracle(theta), c)),
    )
}

/// [`simulator2_equivalence`] for every pattern and every S on n pulses,
/// with no abort.
pub fn simulator2_table(n: usize) -> Result<Vec<EquivalenceReport>> {
    let mut out = Vec::new();
    for k in count_patterns(n) {
        for s in index_subsets(n) {
            out.push(simulator2_equivalence(&k, &s, NO_ABORT)?);
        }
    }
    Ok(out)
}

/// [`simulator3_equivalence`] for every pattern on n pulses.
pub fn simulator3_table(n: usize) -> Result<Vec<EquivalenceReport>> {
    count_patterns(n).iter().map(|k| simulator3_equivalence(k)).collect()
}

/// Monte Carlo Error frequency of the threshold-gadget simulator against a
/// server reporting every multi-photon pulse.
pub fn simulator2_error_rate(n: usize, alpha_sq: f64, t: f64, trials: usize, seed: u64) -> Result<RateEstimate> {
    let flags = run_trials(seed, trials, |rng, _| {
        simulator2_gadget(n, alpha_sq, t, oracle(Angle8::ZERO), &SetPolicy::MultiPhoton, rng).map(|o| o.is_error())
    });
    Ok(RateEstimate::from_flags(flags.into_iter().collect::<Result<Vec<_>>>()?))
}

/// Monte Carlo Error frequency of the post-selected simulator.
pub fn simulator3_error_rate(n: usize, alpha_sq: f64, trials: usize, seed: u64) -> Result<RateEstimate> {
    let flags = run_trials(seed, trials, |rng, _| {
        simulator3_postselected(n, alpha_sq, oracle(Angle8::ZERO), rng).map(|o| o.is_error())
    });
    Ok(RateEstimate::from_flags(flags.into_iter().collect::<Result<Vec<_>>>()?))
}
