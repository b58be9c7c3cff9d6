use crate::error::Result;
use crate::qstate::{DensityOracle, PureState};
use std::collections::{BTreeMap, BTreeSet};

/// Classical-quantum distribution of a server view: for every classical
/// transcript value, the sub-normalized density operator of the server's
/// quantum registers given that value.
#[derive(Clone, Debug)]
pub struct ViewDistribution<K: Ord> {
    entries: BTreeMap<K, DensityOracle>,
}

impl<K: Ord> Default for ViewDistribution<K> {
    fn default() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> ViewDistribution<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: K, weight: f64, state: &PureState) -> Result<()> {
        if !self.entries.contains_key(&key) {
            self.entries
                .insert(key.clone(), DensityOracle::zero(state.labels().to_vec())?);
        }
        self.entries.get_mut(&key).expect("inserted").accumulate(weight, state)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<K, DensityOracle> {
        &self.entries
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.values().map(|d| d.trace().re).sum()
    }

    /// Marginal distribution of the classical part.
    pub fn classical(&self) -> BTreeMap<K, f64> {
        self.entries
            .iter()
            .map(|(k, d)| (k.clone(), d.trace().re))
            .collect()
    }

    /// Total-variation distance between the classical marginals.
    pub fn classical_tv(&self, other: &Self) -> f64 {
        total_variation(&self.classical(), &other.classical())
    }

    /// Trace distance of the two classical-quantum states.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        let keys: BTreeSet<&K> = self.entries.keys().chain(other.entries.keys()).collect();
        let mut d = 0.0;
        for k in keys {
            d += match (self.entries.get(k), other.entries.get(k)) {
                (Some(a), Some(b)) => a.trace_distance(b)?,
                (Some(a), None) | (None, Some(a)) => 0.5 * a.trace().re,
                (None, None) => unreachable!(),
            };
        }
        Ok(d)
    }
}

/// TV distance ½ Σ |p(k) − q(k)| of two finite distributions.
pub fn total_variation<K: Ord>(p: &BTreeMap<K, f64>, q: &BTreeMap<K, f64>) -> f64 {
    let keys: BTreeSet<&K> = p.keys().chain(q.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (p.get(k).copied().unwrap_or(0.0) - q.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}
