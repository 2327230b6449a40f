//! Risk evaluation: exact, Monte Carlo, and worst-case over groups.

use crate::error::{Error, Result};
use crate::problem::MDLInstance;
use crate::rng::substream;
use crate::simplex::SimplexWeights;

/// What is being evaluated: a single hypothesis from the finite class, a
/// randomized hypothesis (weights over the class), or a parameter point in a
/// convex space.
#[derive(Clone, Copy, Debug)]
pub enum Predictor<'a> {
    Pure(usize),
    Mixed(&'a SimplexWeights),
    Point(&'a [f64]),
}

impl<'a> Predictor<'a> {
    /// Loss of the predictor at one datapoint.
    fn loss_at(
        &self,
        instance: &MDLInstance,
        loss: usize,
        z: &crate::data::Datapoint,
    ) -> Result<f64> {
        match self {
            Predictor::Pure(h) => instance.table_loss_value(loss, *h, z),
            Predictor::Mixed(w) => instance.point_loss(loss, w.as_slice(), z),
            Predictor::Point(theta) => Ok(instance.smooth_loss(loss)?.value(theta, z)),
        }
    }
}

/// Exact expected table loss of a pure or randomized hypothesis under one
/// distribution. Randomized hypotheses expand by linearity. Errors on
/// sampler-backed distributions, smooth losses, and `Predictor::Point`
/// (parameter points go through [`support_risk`]).
pub fn exact_risk(
    instance: &MDLInstance,
    predictor: &Predictor,
    dist: usize,
    loss: usize,
) -> Result<f64> {
    if matches!(predictor, Predictor::Point(_)) {
        return Err(Error::invalid(
            "exact_risk evaluates finite-class predictors; use support_risk for parameter points",
        ));
    }
    instance.loss(loss)?.as_table()?;
    let (points, probs) = instance.distribution(dist)?.support()?;
    let mut risk = 0.0;
    for (z, &p) in points.iter().zip(probs) {
        if p != 0.0 {
            risk += p * predictor.loss_at(instance, loss, z)?;
        }
    }
    // Float accumulation can drift a hair outside the loss range.
    Ok(risk.clamp(0.0, 1.0))
}

/// Expected smooth loss of a parameter point over a finite support.
pub fn support_risk(instance: &MDLInstance, theta: &[f64], dist: usize, loss: usize) -> Result<f64> {
    let smooth = instance.smooth_loss(loss)?;
    let (points, probs) = instance.distribution(dist)?.support()?;
    let mut risk = 0.0;
    for (z, &p) in points.iter().zip(probs) {
        if p != 0.0 {
            risk += p * smooth.value(theta, z);
        }
    }
    Ok(risk)
}

/// Monte Carlo risk estimate from `samples` fresh draws. Deterministic in the
/// seed and advances the distribution's draw counter by `samples`.
pub fn monte_carlo_risk(
    instance: &mut MDLInstance,
    predictor: &Predictor,
    dist: usize,
    loss: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::invalid("monte_carlo_risk needs at least one sample"));
    }
    let mut rng = substream(seed, 0);
    let mut drawn = Vec::with_capacity(samples);
    {
        let d = instance.distribution_mut(dist)?;
        for _ in 0..samples {
            drawn.push(d.sample(&mut rng));
        }
    }
    let mut acc = 0.0;
    for z in &drawn {
        acc += predictor.loss_at(instance, loss, z)?;
    }
    Ok(acc / samples as f64)
}

/// Max over all (distribution, loss) pairs of the exact risk.
pub fn worst_case_risk(instance: &MDLInstance, predictor: &Predictor) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..instance.n() {
        for j in 0..instance.m() {
            worst = worst.max(exact_risk(instance, predictor, i, j)?);
        }
    }
    Ok(worst)
}

/// Max over all (distribution, loss) pairs of the smooth-loss support risk.
pub fn worst_support_risk(instance: &MDLInstance, theta: &[f64]) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..instance.n() {
        for j in 0..instance.m() {
            worst = worst.max(support_risk(instance, theta, i, j)?);
        }
    }
    Ok(worst)
}
