//! Group-DRO solving: minimize the worst per-group expected loss over a
//! convex parameter space.
//!
//! [`gdro_solve`] wraps the sampled dynamics of [`mdl_solve`]: mirror descent
//! from the space's center against an implicit-exploration auditor over the
//! groups, with the round budget taken from [`required_iterations`] using the
//! Bregman radius as the learner's regret constant. [`empirical_gdro`] first
//! swaps every group for the uniform distribution over a training batch, so
//! its guarantees hold for the empirical risks.

use crate::data::{DataDistribution, Datapoint};
use crate::dynamics::{mdl_solve, required_iterations_scaled, SolveParams, SolveResult};
use crate::error::{Error, Result};
use crate::problem::MDLInstance;

/// Output of a group-DRO run: the averaged parameter point and the raw
/// dynamics result it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct GdroSolution {
    pub theta: Vec<f64>,
    pub run: SolveResult,
}

/// Solves the group-DRO problem to (expected) accuracy `eps` with confidence
/// `1 - delta`, drawing samples on demand. The instance must have a convex
/// parameter space and a single smooth loss.
pub fn gdro_solve(
    instance: &mut MDLInstance,
    eps: f64,
    delta: f64,
    seed: u64,
) -> Result<GdroSolution> {
    gdro_solve_scaled(instance, eps, delta, seed, 1.0)
}

/// [`gdro_solve`] with the round budget multiplied by `t_scale`.
pub fn gdro_solve_scaled(
    instance: &mut MDLInstance,
    eps: f64,
    delta: f64,
    seed: u64,
    t_scale: f64,
) -> Result<GdroSolution> {
    if instance.param_space().is_err() {
        return Err(Error::UnsupportedExact(
            "group DRO needs a convex parameter space; relax finite classes first".into(),
        ));
    }
    if instance.m() != 1 {
        return Err(Error::invalid(format!(
            "group DRO uses a single loss shared by all groups, got {}",
            instance.m()
        )));
    }
    let space = instance.param_space()?;
    let l = instance.smooth_loss(0)?.norm_bound();
    let r = space.norm_radius();
    let gamma_minus = space.bregman_radius();
    let n = instance.n() as f64;
    let gamma_plus = 4.0 * n * (n / delta).ln();
    let t = required_iterations_scaled(eps, delta, l, r, gamma_minus, gamma_plus, t_scale)?.max(1);
    let run = mdl_solve(instance, t, seed, &SolveParams::default())?;
    Ok(GdroSolution { theta: run.avg_min_action.clone(), run })
}

/// The instance with every group's distribution replaced by the uniform
/// distribution over its batch. Losses and the parameter space carry over.
pub fn empirical_instance(
    instance: &MDLInstance,
    batches: &[Vec<Datapoint>],
) -> Result<MDLInstance> {
    if batches.len() != instance.n() {
        return Err(Error::invalid(format!(
            "{} batches for {} groups",
            batches.len(),
            instance.n()
        )));
    }
    let dists = batches
        .iter()
        .enumerate()
        .map(|(i, batch)| {
            DataDistribution::empirical(batch.clone())
                .map_err(|_| Error::invalid(format!("group {i} has an empty batch")))
        })
        .collect::<Result<Vec<_>>>()?;
    MDLInstance::new(dists, instance.losses().to_vec(), instance.space().clone())
}

/// Group-DRO over training batches: solves the empirical instance built by
/// [`empirical_instance`], so the eps guarantee applies to the worst
/// empirical group risk.
pub fn empirical_gdro(
    instance: &MDLInstance,
    batches: &[Vec<Datapoint>],
    eps: f64,
    delta: f64,
    seed: u64,
) -> Result<GdroSolution> {
    empirical_gdro_scaled(instance, batches, eps, delta, seed, 1.0)
}

/// [`empirical_gdro`] with the round budget multiplied by `t_scale`.
pub fn empirical_gdro_scaled(
    instance: &MDLInstance,
    batches: &[Vec<Datapoint>],
    eps: f64,
    delta: f64,
    seed: u64,
    t_scale: f64,
) -> Result<GdroSolution> {
    let mut empirical = empirical_instance(instance, batches)?;
    gdro_solve_scaled(&mut empirical, eps, delta, seed, t_scale)
}
