//! Datapoints and data distributions.
//!
//! A [`DataDistribution`] either carries an explicit finite support with
//! probabilities (the exact-arithmetic path used by the solvers and oracles)
//! or wraps an arbitrary seeded sampler. Every delivered sample bumps the
//! distribution's draw counter by exactly one; the on-demand solvers read
//! these counters back to certify their sample accounting, so a distribution
//! must not be shared across concurrent runs. Each run owns its own copy.

use std::fmt;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::simplex::SUM_TOLERANCE;

/// A single example. Discrete points carry a feature index and a binary label
/// written as +1 or -1; vector points carry raw coordinates whose meaning is
/// fixed by the loss they are paired with.
#[derive(Clone, Debug, PartialEq)]
pub enum Datapoint {
    Discrete { feature: usize, label: i8 },
    Vector(Vec<f64>),
}

impl Datapoint {
    pub fn discrete(feature: usize, label: i8) -> Result<Self> {
        if label != 1 && label != -1 {
            return Err(Error::invalid(format!("discrete label must be +1 or -1, got {label}")));
        }
        Ok(Datapoint::Discrete { feature, label })
    }

    /// Index of the label in two-slot tables: -1 maps to 0, +1 maps to 1.
    pub fn label_slot(label: i8) -> usize {
        usize::from(label == 1)
    }
}

type SamplerFn = dyn Fn(&mut ChaCha8Rng) -> Datapoint + Send + Sync;

#[derive(Clone)]
enum Support {
    Finite {
        points: Vec<Datapoint>,
        probs: Vec<f64>,
        // Cumulative masses, precomputed for inverse-CDF sampling.
        cdf: Vec<f64>,
    },
    Sampler(Arc<SamplerFn>),
}

/// A sampleable data distribution with a draw counter.
#[derive(Clone)]
pub struct DataDistribution {
    support: Support,
    draws: u64,
}

impl DataDistribution {
    /// Finite-support distribution. Probabilities must be finite, nonnegative,
    /// and sum to 1 within the simplex tolerance.
    pub fn finite(support: Vec<(Datapoint, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::invalid("finite support must be nonempty"));
        }
        let mut points = Vec::with_capacity(support.len());
        let mut probs = Vec::with_capacity(support.len());
        let mut sum = 0.0;
        for (z, p) in support {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::invalid(format!("support probability {p} is not finite and nonnegative")));
            }
            sum += p;
            points.push(z);
            probs.push(p);
        }
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::invalid(format!(
                "support probabilities sum to {sum}, outside 1 +/- {SUM_TOLERANCE}"
            )));
        }
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cdf.push(acc);
        }
        Ok(DataDistribution { support: Support::Finite { points, probs, cdf }, draws: 0 })
    }

    /// Uniform distribution over a batch of points, duplicates kept as given.
    pub fn empirical(batch: Vec<Datapoint>) -> Result<Self> {
        let n = batch.len();
        if n == 0 {
            return Err(Error::invalid("empirical distribution needs a nonempty batch"));
        }
        let p = 1.0 / n as f64;
        let mut support: Vec<(Datapoint, f64)> = batch.into_iter().map(|z| (z, p)).collect();
        // Put any rounding drift on the last atom so validation is exact.
        let drift = 1.0 - p * n as f64;
        if drift != 0.0 {
            support.last_mut().expect("nonempty").1 += drift;
        }
        DataDistribution::finite(support)
    }

    /// Distribution backed by an arbitrary sampling procedure. Exact risk
    /// evaluation is unavailable for these; only Monte Carlo works.
    pub fn from_sampler(sampler: impl Fn(&mut ChaCha8Rng) -> Datapoint + Send + Sync + 'static) -> Self {
        DataDistribution { support: Support::Sampler(Arc::new(sampler)), draws: 0 }
    }

    pub fn is_finite_support(&self) -> bool {
        matches!(self.support, Support::Finite { .. })
    }

    /// Support points and probabilities, or an unsupported-exact error for
    /// sampler-backed distributions.
    pub fn support(&self) -> Result<(&[Datapoint], &[f64])> {
        match &self.support {
            Support::Finite { points, probs, .. } => Ok((points, probs)),
            Support::Sampler(_) => Err(Error::UnsupportedExact(
                "distribution has no finite support; only sampling is available".into(),
            )),
        }
    }

    /// Draws one sample and increments the draw counter by exactly 1.
    pub fn sample(&mut self, rng: &mut ChaCha8Rng) -> Datapoint {
        self.draws += 1;
        match &self.support {
            Support::Finite { points, cdf, .. } => {
                use rand::Rng;
                let u: f64 = rng.gen::<f64>();
                let idx = match cdf.iter().position(|&c| u < c) {
                    Some(i) => i,
                    None => cdf.len() - 1,
                };
                points[idx].clone()
            }
            Support::Sampler(f) => f(rng),
        }
    }

    /// Number of samples delivered so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Resets the draw counter, for reusing a distribution across runs that
    /// each want fresh accounting.
    pub fn reset_draws(&mut self) {
        self.draws = 0;
    }

    /// Mean of vector-valued support points. Errors on discrete points or a
    /// sampler-backed distribution.
    pub fn mean_vector(&self) -> Result<Vec<f64>> {
        let (points, probs) = self.support()?;
        let dim = match &points[0] {
            Datapoint::Vector(v) => v.len(),
            Datapoint::Discrete { .. } => {
                return Err(Error::invalid("mean_vector needs vector-valued support points"))
            }
        };
        let mut mean = vec![0.0; dim];
        for (z, &p) in points.iter().zip(probs) {
            match z {
                Datapoint::Vector(v) if v.len() == dim => {
                    for (m, x) in mean.iter_mut().zip(v) {
                        *m += p * x;
                    }
                }
                _ => return Err(Error::invalid("mixed or ragged support in mean_vector")),
            }
        }
        Ok(mean)
    }
}

impl fmt::Debug for DataDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.support {
            Support::Finite { points, .. } => f
                .debug_struct("DataDistribution")
                .field("support_size", &points.len())
                .field("draws", &self.draws)
                .finish(),
            Support::Sampler(_) => f
                .debug_struct("DataDistribution")
                .field("support", &"sampler")
                .field("draws", &self.draws)
                .finish(),
        }
    }
}
