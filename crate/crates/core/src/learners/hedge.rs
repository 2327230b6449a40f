//! Exponential weights over a finite action set.

use crate::error::{Error, Result};
use crate::simplex::SimplexWeights;

/// Full-information exponential weights.
///
/// Keeps cumulative costs per action and plays weights proportional to
/// `exp(-rate * cumulative)`. The checked update accepts costs in [-2, 2]
/// and rejects anything outside rather than clamping, so a caller feeding
/// unnormalized values hears about it.
#[derive(Clone, Debug)]
pub struct Hedge {
    rate: f64,
    cumulative: Vec<f64>,
}

impl Hedge {
    pub fn new(k: usize, rate: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("hedge needs at least one action"));
        }
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::invalid("hedge rate must be positive and finite"));
        }
        Ok(Self { rate, cumulative: vec![0.0; k] })
    }

    pub fn k(&self) -> usize {
        self.cumulative.len()
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn cumulative_costs(&self) -> &[f64] {
        &self.cumulative
    }

    /// Current action: softmax of `-rate * cumulative`, computed with a max
    /// shift so large cumulative costs cannot underflow every entry at once.
    pub fn weights(&self) -> SimplexWeights {
        let min = self.cumulative.iter().cloned().fold(f64::INFINITY, f64::min);
        let raw: Vec<f64> =
            self.cumulative.iter().map(|&c| (-self.rate * (c - min)).exp()).collect();
        SimplexWeights::normalized(raw).expect("softmax of finite costs is a valid simplex point")
    }

    /// Advances cumulative costs and returns the new weights.
    pub fn update(&mut self, costs: &[f64]) -> Result<SimplexWeights> {
        for &c in costs {
            if !c.is_finite() || !(-2.0..=2.0).contains(&c) {
                return Err(Error::invalid(format!(
                    "hedge cost {c} outside [-2, 2]; normalize before updating"
                )));
            }
        }
        self.update_unchecked(costs)
    }

    /// Update without the range check. Importance-weighted bandit estimates
    /// exceed [-2, 2] by construction and enter through this path.
    pub(crate) fn update_unchecked(&mut self, costs: &[f64]) -> Result<SimplexWeights> {
        if costs.len() != self.cumulative.len() {
            return Err(Error::invalid(format!(
                "cost vector has length {}, expected {}",
                costs.len(),
                self.cumulative.len()
            )));
        }
        for &c in costs {
            if !c.is_finite() {
                return Err(Error::invalid("hedge cost must be finite"));
            }
        }
        for (acc, &c) in self.cumulative.iter_mut().zip(costs) {
            *acc += c;
        }
        Ok(self.weights())
    }
}

/// Learning rate `sqrt(ln(k) / T)`, tuned for the total-regret bound
/// `2 sqrt(T ln k)` on costs in [0, 1].
pub fn hedge_default_rate(k: usize, t: u64) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid("default rate needs k >= 2"));
    }
    if t == 0 {
        return Err(Error::invalid("default rate needs T >= 1"));
    }
    Ok(((k as f64).ln() / t as f64).sqrt())
}
