//! Randomness plumbing: the [`Chooser`] abstraction lets the same protocol
//! code either sample (any `rand` generator) or enumerate every branch with
//! its exact probability ([`enumerate_branches`]).

use crate::qstate::Angle8;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Weights at or below this are treated as impossible branches.
pub const ZERO_WEIGHT: f64 = 1e-13;

/// Source of discrete random choices.
pub trait Chooser {
    /// Picks an index with probability proportional to `weights`.
    /// Indices whose weight is at most [`ZERO_WEIGHT`] are never returned.
    fn choose(&mut self, weights: &[f64]) -> usize;

    /// A bit that is 1 with probability `p_one`.
    fn bit(&mut self, p_one: f64) -> bool {
        self.choose(&[1.0 - p_one, p_one]) == 1
    }

    fn fair_bit(&mut self) -> bool {
        self.bit(0.5)
    }

    fn uniform_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "uniform_index over an empty range");
        self.choose(&vec![1.0; n])
    }

    fn angle(&mut self) -> Angle8 {
        Angle8::new(self.uniform_index(8) as i64)
    }
}

fn uniform_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl<R: RngCore + ?Sized> Chooser for R {
    fn choose(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().filter(|&&w| w > ZERO_WEIGHT).sum();
        assert!(total > 0.0, "no branch with positive weight");
        let mut u = uniform_f64(self) * total;
        let mut last = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w <= ZERO_WEIGHT {
                continue;
            }
            last = i;
            if u < w {
                return i;
            }
            u -= w;
        }
        last
    }
}

/// Chooser that replays a forced prefix of choices, then takes the first
/// possible branch, recording everything it did.
#[derive(Debug, Default)]
pub struct PathChooser {
    forced: Vec<usize>,
    taken: Vec<(usize, Vec<f64>)>,
    probability: f64,
}

impl PathChooser {
    fn with_prefix(forced: Vec<usize>) -> Self {
        PathChooser {
            forced,
            taken: Vec::new(),
            probability: 1.0,
        }
    }

    /// Probability of the path taken so far.
    pub fn probability(&self) -> f64 {
        self.probability
    }

    fn next_prefix(&self) -> Option<Vec<usize>> {
        for d in (0..self.taken.len()).rev() {
            let (idx, ref w) = self.taken[d];
            if let Some(j) = (idx + 1..w.len()).find(|&j| w[j] > ZERO_WEIGHT) {
                let mut p: Vec<usize> = self.taken[..d].iter().map(|(i, _)| *i).collect();
                p.push(j);
                return Some(p);
            }
        }
        None
    }
}

impl Chooser for PathChooser {
    fn choose(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().filter(|&&w| w > ZERO_WEIGHT).sum();
        assert!(total > 0.0, "no branch with positive weight");
        let depth = self.taken.len();
        let idx = match self.forced.get(depth) {
            Some(&i) => i,
            None => weights
                .iter()
                .position(|&w| w > ZERO_WEIGHT)
                .expect("positive total"),
        };
        self.probability *= weights[idx] / total;
        self.taken.push((idx, weights.to_vec()));
        idx
    }
}

/// Runs `f` once per branch of its random choices and returns each result
/// with the branch probability. `f` must be deterministic given its choices.
pub fn enumerate_branches<T, F>(mut f: F) -> Vec<(f64, T)>
where
    F: FnMut(&mut PathChooser) -> T,
{
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    loop {
        let mut pc = PathChooser::with_prefix(prefix);
        let value = f(&mut pc);
        out.push((pc.probability, value));
        match pc.next_prefix() {
            Some(p) => prefix = p,
            None => return out,
        }
    }
}

/// The generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `count` independent trials in parallel; results are in trial order
/// and do not depend on the thread count.
pub fn run_trials<T, F>(seed: u64, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| f(&mut trial_rng(seed, i as u64), i))
        .collect()
}

/// Uniformly random `k`-subset of `0..n`, sorted.
pub fn choose_subset<C: Chooser + ?Sized>(n: usize, k: usize, rng: &mut C) -> Vec<usize> {
    assert!(k <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.uniform_index(n - i);
        pool.swap(i, j);
    }
    let mut out = pool[..k].to_vec();
    out.sort_unstable();
    out
}

/// Empirical frequency of an event over independent trials.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct RateEstimate {
    pub trials: usize,
    pub events: usize,
    pub rate: f64,
}

impl RateEstimate {
    pub fn from_counts(events: usize, trials: usize) -> Self {
        Self {
            trials,
            events,
            rate: if trials == 0 { 0.0 } else { events as f64 / trials as f64 },
        }
    }

    pub fn from_flags(flags: impl IntoIterator<Item = bool>) -> Self {
        let (mut events, mut trials) = (0, 0);
        for f in flags {
            trials += 1;
            events += f as usize;
        }
        Self::from_counts(events, trials)
    }

    /// Binomial standard deviation of the rate under probability `p`.
    pub fn sigma(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// rate ≤ bound + `sigmas`·σ(bound).
    pub fn below(&self, bound: f64, sigmas: f64) -> bool {
        let b = bound.min(1.0);
        self.rate <= b + sigmas * self.sigma(b)
    }

    /// |rate − p| ≤ `sigmas`·σ(p).
    pub fn near(&self, p: f64, sigmas: f64) -> bool {
        (self.rate - p).abs() <= sigmas * self.sigma(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_covers_all_branches() {
        let branches = enumerate_branches(|c| {
            let a = c.fair_bit();
            let b = c.choose(&[0.25, 0.0, 0.75]);
            (a, b)
        });
        assert_eq!(branches.len(), 4);
        let total: f64 = branches.iter().map(|(p, _)| p).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(branches.iter().all(|(_, (_, b))| *b != 1));
        let p = branches.iter().find(|(_, v)| *v == (true, 2)).unwrap().0;
        assert!((p - 0.375).abs() < 1e-15);
    }

    #[test]
    fn enumeration_with_data_dependent_depth() {
        let branches = enumerate_branches(|c| if c.fair_bit() { c.angle().value() } else { 99 });
        assert_eq!(branches.len(), 9);
    }

    #[test]
    fn rng_skips_zero_weights() {
        let mut rng = trial_rng(1, 0);
        for _ in 0..1000 {
            assert_ne!(rng.choose(&[0.3, 0.0, 0.7]), 1);
            assert!(!rng.bit(0.0));
            assert!(rng.bit(1.0));
        }
    }

    #[test]
    fn trials_are_reproducible() {
        use rand::Rng;
        let a = run_trials(7, 50, |r, _| r.random::<u64>());
        let b = run_trials(7, 50, |r, _| r.random::<u64>());
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn subset_is_sorted_and_distinct() {
        let mut rng = trial_rng(3, 0);
        let s = choose_subset(10, 4, &mut rng);
        assert_eq!(s.len(), 4);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }
}
