//! Robust training on pre-collected group splits.
//!
//! Works from empirical data rather than sampling oracles: each round a
//! Hedge adversary over groups is refreshed from small validation batches,
//! the learner takes gradient steps on a minibatch drawn from the
//! adversary's mixture of the training splits, and the averaged parameters
//! are returned. With a single group the loop reduces to plain minibatch
//! SGD on that group's training split.

use rand::Rng;

use crate::data::Datapoint;
use crate::error::{Error, Result};
use crate::learners::{hedge_default_rate, Hedge, OmdLearner};
use crate::problem::{HypothesisSpace, MDLInstance};
use crate::rng::{substream, STREAM_AUDITOR_SAMPLING, STREAM_LEARNER_SAMPLING};
use crate::simplex::SimplexWeights;

#[derive(Clone, Debug)]
pub struct RmdlConfig {
    pub rounds: u64,
    /// Learner minibatch size per round, drawn from the mixture of training
    /// splits under the adversary's current weights.
    pub train_batch: usize,
    /// Validation draws per group per round feeding the adversary.
    pub val_batch: usize,
    /// Gradient steps per round on the same minibatch.
    pub steps_per_round: usize,
    /// Learner step size; `None` picks `sqrt(2 D / (L^2 T))` for the space's
    /// Bregman radius D over the total number of gradient steps.
    pub learner_rate: Option<f64>,
    /// Adversary Hedge rate; `None` picks the horizon-tuned default.
    pub adversary_rate: Option<f64>,
}

impl Default for RmdlConfig {
    fn default() -> Self {
        RmdlConfig {
            rounds: 64,
            train_batch: 8,
            val_batch: 8,
            steps_per_round: 1,
            learner_rate: None,
            adversary_rate: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RmdlOutcome {
    /// Parameters averaged over the per-round iterates.
    pub theta: Vec<f64>,
    /// Mean loss of `theta` over each validation split.
    pub group_risks: Vec<f64>,
    pub adversary_weights: SimplexWeights,
}

pub fn rmdl_train(
    instance: &MDLInstance,
    train: &[Vec<Datapoint>],
    validation: &[Vec<Datapoint>],
    config: &RmdlConfig,
    seed: u64,
) -> Result<RmdlOutcome> {
    let HypothesisSpace::Convex(space) = instance.space() else {
        return Err(Error::UnsupportedExact(
            "robust training expects a convex parameter space; relax finite classes first".into(),
        ));
    };
    let space = space.clone();
    if instance.m() != 1 {
        return Err(Error::invalid("robust training expects a single loss"));
    }
    let n = instance.n();
    if train.len() != n || validation.len() != n {
        return Err(Error::invalid(format!(
            "expected {n} training and validation splits, got {} and {}",
            train.len(),
            validation.len()
        )));
    }
    for (i, split) in train.iter().enumerate() {
        if split.is_empty() {
            return Err(Error::invalid(format!("group {i} has an empty training split")));
        }
    }
    for (i, split) in validation.iter().enumerate() {
        if split.is_empty() {
            return Err(Error::invalid(format!("group {i} has an empty validation split")));
        }
    }
    if config.rounds == 0 || config.train_batch == 0 || config.val_batch == 0 {
        return Err(Error::invalid("rounds and batch sizes must be positive"));
    }
    if config.steps_per_round == 0 {
        return Err(Error::invalid("steps_per_round must be positive"));
    }

    let loss = instance.smooth_loss(0)?.clone();
    let total_steps = config.rounds * config.steps_per_round as u64;
    let learner_rate = match config.learner_rate {
        Some(r) if r > 0.0 => r,
        Some(r) => return Err(Error::invalid(format!("learner rate must be positive, got {r}"))),
        None => {
            let l = loss.norm_bound();
            (2.0 * space.bregman_radius() / (l * l * total_steps as f64)).sqrt()
        }
    };
    let adversary_rate = match config.adversary_rate {
        Some(r) if r > 0.0 => r,
        Some(r) => return Err(Error::invalid(format!("adversary rate must be positive, got {r}"))),
        None if n >= 2 => hedge_default_rate(n, config.rounds)?,
        None => 1.0,
    };

    let mut learner = OmdLearner::new(space, learner_rate)?;
    let mut adversary = Hedge::new(n, adversary_rate)?;
    let mut train_rng = substream(seed, STREAM_LEARNER_SAMPLING);
    let mut val_rng = substream(seed, STREAM_AUDITOR_SAMPLING);

    let dim = learner.theta().len();
    let mut theta_sum = vec![0.0f64; dim];
    for _ in 0..config.rounds {
        let weights = adversary.weights();
        let minibatch: Vec<&Datapoint> = (0..config.train_batch)
            .map(|_| {
                let group = weights.sample_index(&mut train_rng);
                let split = &train[group];
                &split[train_rng.gen_range(0..split.len())]
            })
            .collect();
        for _ in 0..config.steps_per_round {
            let theta = learner.theta().to_vec();
            let mut grad = vec![0.0f64; dim];
            for z in &minibatch {
                for (g, gi) in grad.iter_mut().zip(loss.gradient(&theta, z)) {
                    *g += gi;
                }
            }
            for g in &mut grad {
                *g /= config.train_batch as f64;
            }
            learner.observe(&grad)?;
        }
        for (t, sum) in learner.theta().iter().zip(&mut theta_sum) {
            *sum += t;
        }
        // The adversary sees one minus the validated risk so that costly
        // groups (high risk, low cost) gain weight.
        let theta = learner.theta().to_vec();
        let costs: Vec<f64> = validation
            .iter()
            .map(|split| {
                let total: f64 = (0..config.val_batch)
                    .map(|_| loss.value(&theta, &split[val_rng.gen_range(0..split.len())]))
                    .sum();
                1.0 - total / config.val_batch as f64
            })
            .collect();
        adversary.update(&costs)?;
    }

    let theta: Vec<f64> = theta_sum.iter().map(|s| s / config.rounds as f64).collect();
    let group_risks = validation
        .iter()
        .map(|split| split.iter().map(|z| loss.value(&theta, z)).sum::<f64>() / split.len() as f64)
        .collect();
    Ok(RmdlOutcome { theta, group_risks, adversary_weights: adversary.weights() })
}
