use super::server::ServerPolicy;
use super::transcript::Transcript;
use super::ubqc::{delegated_round, DelegationSettings, RoundPlan};
use crate::error::{invalid, Error, Result};
use crate::graphs::{enumerate_tests, input_bit_map, Graph, MeasurementPattern};
use crate::sampling::{choose_subset, Chooser};
use rand::Rng;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq)]
pub struct SdqcConfig {
    /// Total rounds N.
    pub repetitions: usize,
    /// Fraction of rounds used as tests.
    pub test_fraction: f64,
    /// Tolerated failed tests w; `None` means ⌊|T|/10⌋.
    pub max_failures: Option<usize>,
    pub delegation: DelegationSettings,
}

impl SdqcConfig {
    pub fn new(repetitions: usize, test_fraction: f64) -> Result<Self> {
        let cfg = Self {
            repetitions,
            test_fraction,
            max_failures: None,
            delegation: DelegationSettings::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 2 {
            return Err(invalid("repetitions", "at least 2"));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(invalid("test_fraction", "in (0, 1)"));
        }
        if let Some(w) = self.max_failures {
            if w >= self.test_count() {
                return Err(invalid("max_failures", "below the number of test rounds"));
            }
        }
        Ok(())
    }

    /// |T| = round(fraction·N), kept inside [1, N−1].
    pub fn test_count(&self) -> usize {
        let t = (self.test_fraction * self.repetitions as f64).round() as usize;
        t.clamp(1, self.repetitions - 1)
    }

    pub fn threshold(&self) -> usize {
        self.max_failures.unwrap_or(self.test_count() / 10)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SdqcOutcome {
    Output { bits: Vec<bool> },
    /// More than `threshold` tests failed.
    TestAbort { failed: usize, threshold: usize },
    /// State preparation aborted in `round`.
    PreparationAbort { round: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdqcReport {
    pub outcome: SdqcOutcome,
    pub test_rounds: Vec<usize>,
    /// Normalized parity of each executed test, in round order.
    pub test_parities: Vec<bool>,
    pub failed_tests: usize,
    pub threshold: usize,
    /// Output of each executed computation round.
    pub computation_outputs: Vec<Vec<bool>>,
    pub transcript: Transcript,
}

impl SdqcReport {
    pub fn aborted(&self) -> bool {
        !matches!(self.outcome, SdqcOutcome::Output { .. })
    }
}

/// Most frequent output; ties go to the one seen first.
pub fn majority(outputs: &[Vec<bool>]) -> Option<Vec<bool>> {
    let mut counts: Vec<(&Vec<bool>, usize)> = Vec::new();
    for o in outputs {
        match counts.iter_mut().find(|(k, _)| *k == o) {
            Some((_, c)) => *c += 1,
            None => counts.push((o, 1)),
        }
    }
    let best = counts.iter().map(|(_, c)| *c).max()?;
    counts.into_iter().find(|(_, c)| *c == best).map(|(k, _)| k.clone())
}

/// Verified delegation: computation rounds interleaved with stabilizer
/// tests at uniformly random positions.
pub fn sdqc_run<R: Rng + ?Sized>(
    graph: &Graph,
    pattern: &MeasurementPattern,
    x: &[bool],
    config: &SdqcConfig,
    server: &mut dyn ServerPolicy,
    rng: &mut R,
) -> Result<SdqcReport> {
    config.validate()?;
    if pattern.len() != graph.len() {
        return Err(Error::PatternMismatch("pattern size differs from graph".into()));
    }
    let tests = enumerate_tests(graph)?;
    let x = input_bit_map(graph, x)?;
    let threshold = config.threshold();
    let test_rounds = choose_subset(config.repetitions, config.test_count(), rng);
    let mut report = SdqcReport {
        outcome: SdqcOutcome::Output { bits: Vec::new() },
        test_rounds,
        test_parities: Vec::new(),
        failed_tests: 0,
        threshold,
        computation_outputs: Vec::new(),
        transcript: Transcript::new(),
    };

    for round in 0..config.repetitions {
        let is_test = report.test_rounds.binary_search(&round).is_ok();
        let test = is_test.then(|| &tests[rng.uniform_index(tests.len())]);
        let plan = match test {
            Some(t) => RoundPlan::Test(t),
            None => RoundPlan::Compute { pattern, x: x.clone() },
        };
        let res = delegated_round(graph, &plan, &config.delegation, server, round, rng)?;
        report.transcript.extend(res.transcript);
        let Some(s) = res.outcomes else {
            report.outcome = SdqcOutcome::PreparationAbort { round };
            return Ok(report);
        };
        match test {
            Some(t) => {
                let parity = t.normalized_parity(&s);
                report.failed_tests += parity as usize;
                report.test_parities.push(parity);
            }
            None => report
                .computation_outputs
                .push(graph.outputs().iter().map(|&v| s[v]).collect()),
        }
    }

    report.outcome = if report.failed_tests > threshold {
        SdqcOutcome::TestAbort { failed: report.failed_tests, threshold }
    } else {
        SdqcOutcome::Output {
            bits: majority(&report.computation_outputs).expect("at least one computation round"),
        }
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::server::{Deviation, DeviatingServer, HonestServer};
    use crate::qstate::{Angle8, Gate};
    use crate::sampling::trial_rng;

    fn grid_pattern() -> (Graph, MeasurementPattern) {
        let g = Graph::grid(2, 2);
        let p = MeasurementPattern::new(&g, [0, 1, 7, 0].map(Angle8::new).to_vec()).unwrap();
        (g, p)
    }

    #[test]
    fn counts_and_threshold() {
        let c = SdqcConfig::new(100, 0.5).unwrap();
        assert_eq!((c.test_count(), c.threshold()), (50, 5));
        let c = SdqcConfig::new(3, 0.01).unwrap();
        assert_eq!(c.test_count(), 1);
        let c = SdqcConfig::new(3, 0.99).unwrap();
        assert_eq!(c.test_count(), 2);
        assert!(SdqcConfig::new(1, 0.5).is_err());
        assert!(SdqcConfig::new(10, 1.0).is_err());
        assert!(SdqcConfig { max_failures: Some(5), ..SdqcConfig::new(10, 0.5).unwrap() }.validate().is_err());
    }

    #[test]
    fn majority_ties_first_seen() {
        let a = vec![true];
        let b = vec![false];
        assert_eq!(majority(&[a.clone(), b.clone()]), Some(a.clone()));
        assert_eq!(majority(&[a.clone(), b.clone(), b.clone()]), Some(b));
        assert_eq!(majority(&[]), None);
    }

    #[test]
    fn honest_server_never_fails_tests() {
        let (g, p) = grid_pattern();
        let cfg = SdqcConfig::new(40, 0.5).unwrap();
        for seed in 0..10 {
            let r = sdqc_run(&g, &p, &[false, false], &cfg, &mut HonestServer, &mut trial_rng(seed, 0)).unwrap();
            assert_eq!(r.failed_tests, 0);
            assert_eq!(r.outcome, SdqcOutcome::Output { bits: vec![false, false] });
            assert_eq!(r.test_parities.len(), 20);
            assert_eq!(r.computation_outputs.len(), 20);
        }
    }

    #[test]
    fn z_attack_is_caught() {
        let (g, p) = grid_pattern();
        let cfg = SdqcConfig::new(60, 0.5).unwrap();
        let mut aborts = 0;
        for seed in 0..20 {
            let mut srv = DeviatingServer::new(vec![Deviation::Gate { gate: Gate::Z, vertex: 0 }]);
            let r = sdqc_run(&g, &p, &[false, false], &cfg, &mut srv, &mut trial_rng(seed, 0)).unwrap();
            aborts += r.aborted() as usize;
        }
        assert_eq!(aborts, 20);
    }

    #[test]
    fn oversized_graph_rejected() {
        let g = Graph::path(17);
        let p = MeasurementPattern::new(&g, vec![Angle8::ZERO; 17]).unwrap();
        let cfg = SdqcConfig::new(4, 0.5).unwrap();
        assert!(matches!(
            sdqc_run(&g, &p, &[false], &cfg, &mut HonestServer, &mut trial_rng(0, 0)),
            Err(Error::GraphTooLarge { .. })
        ));
    }
}
