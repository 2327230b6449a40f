//! Probability vectors over a finite index set.
//!
//! [`SimplexWeights`] is the shared currency of the library: randomized
//! hypotheses, adversary weights over distribution/loss pairs, and mixture
//! weights over groups are all validated through it. Construction enforces
//! nonnegative entries summing to one within `SUM_TOLERANCE`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance on `sum(entries) - 1` accepted at construction.
pub const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexWeights(Vec<f64>);

impl SimplexWeights {
    /// Validates and wraps a weight vector. Entries must be finite and
    /// nonnegative and sum to 1 within [`SUM_TOLERANCE`].
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("weight vector must be nonempty"));
        }
        let mut sum = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::invalid(format!(
                    "weight {w} at index {i} is not a finite nonnegative number"
                )));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::invalid(format!(
                "weights sum to {sum}, outside 1 +/- {SUM_TOLERANCE}"
            )));
        }
        Ok(SimplexWeights(weights))
    }

    /// Rescales a nonnegative vector with positive total mass onto the simplex.
    pub fn normalized(raw: Vec<f64>) -> Result<Self> {
        let mut sum = 0.0;
        for &w in &raw {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::invalid("normalized() needs finite nonnegative entries"));
            }
            sum += w;
        }
        if sum <= 0.0 {
            return Err(Error::invalid("normalized() needs positive total mass"));
        }
        let scaled: Vec<f64> = raw.into_iter().map(|w| w / sum).collect();
        // Rescaled entries can still miss 1 by a few ulps on long vectors; nudge
        // the largest entry so the constructor's tolerance always holds.
        let drift: f64 = 1.0 - scaled.iter().sum::<f64>();
        let mut scaled = scaled;
        if drift != 0.0 {
            let argmax = (0..scaled.len())
                .max_by(|&a, &b| scaled[a].total_cmp(&scaled[b]))
                .expect("nonempty");
            scaled[argmax] += drift;
            if scaled[argmax] < 0.0 {
                scaled[argmax] = 0.0;
            }
        }
        SimplexWeights::new(scaled)
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("uniform weights need k >= 1"));
        }
        SimplexWeights::normalized(vec![1.0; k])
    }

    /// Point mass on one index.
    pub fn delta(k: usize, index: usize) -> Result<Self> {
        if index >= k {
            return Err(Error::invalid(format!("delta index {index} out of range for k={k}")));
        }
        let mut w = vec![0.0; k];
        w[index] = 1.0;
        SimplexWeights::new(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Inverse-CDF sample of an index. One uniform draw per call.
    pub fn sample_index(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.gen::<f64>();
        let mut acc = 0.0;
        for (i, &w) in self.0.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        // Rounding in the partial sums can leave u just above the final
        // accumulated mass; the draw belongs to the last positive-mass index.
        self.0
            .iter()
            .rposition(|&w| w > 0.0)
            .unwrap_or(self.0.len() - 1)
    }

    /// Total mass on a set of indices.
    pub fn mass(&self, indices: &[usize]) -> f64 {
        indices.iter().map(|&i| self.0[i]).sum()
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        debug_assert_eq!(self.0.len(), other.len());
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }
}

impl AsRef<[f64]> for SimplexWeights {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}
