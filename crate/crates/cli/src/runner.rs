//! Experiment execution: single runs, scaling sweeps, and the head-to-head
//! robust-training comparison.
//!
//! Seeds fan out across threads; every run owns a fresh instance copy so the
//! draw counters stay per-run. Records come back in seed order regardless of
//! scheduling.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use mdlearn::instances::SPEC_HEADER;
use mdlearn::problem::parse_instance;
use mdlearn::rng::{derive_seed, substream, STREAM_GENERATOR};
use mdlearn::{
    batch_erm_baseline, brute_force_opt, logistic_loss, make_convex_gdro, mdl_solve, rmdl_train,
    BatchErmModel, ConvexGdroMeta, ConvexParamSpace, DataDistribution, Datapoint, Error,
    HypothesisSpace, InstanceSpec, MDLInstance, Predictor, Result, RmdlConfig, SimplexWeights,
    SolveParams, SolveResult,
};

use crate::config::{Algorithm, ExperimentConfig, InstanceSource};
use crate::records::RunRecord;

/// Rounds the doubling search starts from and the cap it refuses to cross.
/// The start sits low enough that easy targets still resolve a threshold
/// instead of saturating at the first probe.
pub const SEARCH_START_ROUNDS: u64 = 2;
pub const SEARCH_CAP_ROUNDS: u64 = 1 << 22;
/// Per-distribution budgets for the batch baseline's search.
pub const SEARCH_START_BUDGET: usize = 1;
pub const SEARCH_CAP_BUDGET: usize = 1 << 20;

/// Builds the instance a config points at. Spec-built bilinear instances keep
/// their generator metadata so the exact optimum survives.
pub fn materialize(source: &InstanceSource) -> Result<(MDLInstance, Option<ConvexGdroMeta>)> {
    match source {
        InstanceSource::File(path) => {
            let text = std::fs::read_to_string(path)?;
            if text.lines().next().map(str::trim) == Some(SPEC_HEADER) {
                build_spec(&InstanceSpec::parse(&text)?)
            } else {
                Ok((parse_instance(&text)?, None))
            }
        }
        InstanceSource::Spec(spec) => build_spec(spec),
    }
}

fn build_spec(spec: &InstanceSpec) -> Result<(MDLInstance, Option<ConvexGdroMeta>)> {
    if let InstanceSpec::ConvexGdro { dim, n, family, seed } = *spec {
        let (instance, meta) = make_convex_gdro(dim, n, family, seed)?;
        Ok((instance, Some(meta)))
    } else {
        Ok((spec.build()?, None))
    }
}

/// The exact worst-group optimum when any oracle can certify one.
pub fn exact_opt(instance: &MDLInstance, meta: Option<&ConvexGdroMeta>) -> Option<f64> {
    if let Some(opt) = meta.and_then(|m| m.exact_opt) {
        return Some(opt);
    }
    brute_force_opt(instance).ok().map(|report| report.value)
}

/// Iteration count for `mdl` runs, from the instance's own constants: Hedge
/// and bandit regret rates for finite classes, the space geometry for convex
/// ones.
pub fn mdl_iterations(instance: &MDLInstance, eps: f64, delta: f64, t_scale: f64) -> Result<u64> {
    let n = instance.n() as f64;
    let m = instance.m() as f64;
    match instance.space() {
        HypothesisSpace::Finite(class) => {
            let gamma_minus = 4.0 * (class.size() as f64).ln();
            let gamma_plus = 4.0 * n * (n * m / delta).ln();
            mdlearn::required_iterations_scaled(eps, delta, 1.0, 1.0, gamma_minus, gamma_plus, t_scale)
        }
        HypothesisSpace::Convex(space) => {
            let l = instance.smooth_loss(0)?.norm_bound();
            let gamma_plus = 4.0 * n * (n / delta).ln();
            mdlearn::required_iterations_scaled(
                eps,
                delta,
                l,
                space.norm_radius(),
                space.bregman_radius(),
                gamma_plus,
                t_scale,
            )
        }
    }
}

fn mixture_weights(result: &SolveResult) -> Result<SimplexWeights> {
    SimplexWeights::normalized(result.avg_min_action.clone())
}

/// Worst exact group risk of a solve's averaged learner action.
fn solve_worst_risk(instance: &MDLInstance, result: &SolveResult) -> Result<f64> {
    match instance.space() {
        HypothesisSpace::Finite(_) => {
            let weights = mixture_weights(result)?;
            mdlearn::worst_case_risk(instance, &Predictor::Mixed(&weights))
        }
        HypothesisSpace::Convex(_) => {
            mdlearn::worst_support_risk(instance, &result.avg_min_action)
        }
    }
}

fn space_size(instance: &MDLInstance) -> usize {
    match instance.space() {
        HypothesisSpace::Finite(class) => class.size(),
        HypothesisSpace::Convex(space) => space.dim(),
    }
}

struct RunOutput {
    samples_used: u64,
    worst_group_risk: f64,
}

fn run_one(
    algorithm: Algorithm,
    instance: &mut MDLInstance,
    eps: f64,
    delta: f64,
    t_scale: f64,
    seed: u64,
) -> Result<RunOutput> {
    instance.reset_draws();
    let convex = matches!(instance.space(), HypothesisSpace::Convex(_));
    let output = match algorithm {
        Algorithm::Mdl | Algorithm::Gdro if convex => {
            let solution = mdlearn::gdro_solve_scaled(instance, eps, delta, seed, t_scale)?;
            let worst = mdlearn::worst_support_risk(instance, &solution.theta)?;
            RunOutput { samples_used: solution.run.total_samples, worst_group_risk: worst }
        }
        Algorithm::Mdl => {
            let t = mdl_iterations(instance, eps, delta, t_scale)?;
            let result = mdl_solve(instance, t, seed, &SolveParams::default())?;
            let worst = solve_worst_risk(instance, &result)?;
            RunOutput { samples_used: result.total_samples, worst_group_risk: worst }
        }
        Algorithm::Gdro => {
            return Err(Error::invalid(
                "gdro runs need a convex instance; use the mdl algorithm on finite classes",
            ))
        }
        Algorithm::BatchErm => {
            // Matched to what an mdl run would spend at the same settings.
            let t = mdl_iterations(instance, eps, delta, t_scale)?;
            let budget = (2 * t).div_ceil(instance.n() as u64) as usize;
            let outcome = batch_erm_baseline(instance, budget, seed)?;
            let worst = model_worst_risk(instance, &outcome.model)?;
            RunOutput { samples_used: outcome.samples_used, worst_group_risk: worst }
        }
        Algorithm::Rmdl if convex => {
            let (train, validation) = draw_splits(instance, RMDL_TRAIN_SPLIT, RMDL_VAL_SPLIT, seed)?;
            let outcome = rmdl_train(instance, &train, &validation, &RmdlConfig::default(), seed)?;
            let worst = mdlearn::worst_support_risk(instance, &outcome.theta)?;
            RunOutput { samples_used: instance.total_draws(), worst_group_risk: worst }
        }
        Algorithm::Rmdl => {
            return Err(Error::invalid(
                "rmdl runs need a convex instance; relax finite classes first",
            ))
        }
    };
    if instance.total_draws() != output.samples_used {
        return Err(Error::ContractViolation(format!(
            "recorded {} samples but the draw counters show {}",
            output.samples_used,
            instance.total_draws()
        )));
    }
    Ok(output)
}

fn model_worst_risk(instance: &MDLInstance, model: &BatchErmModel) -> Result<f64> {
    match model {
        BatchErmModel::Hypothesis(h) => mdlearn::worst_case_risk(instance, &Predictor::Pure(*h)),
        BatchErmModel::Point(theta) => mdlearn::worst_support_risk(instance, theta),
    }
}

/// Per-group training and validation splits for `rmdl` runs through the
/// generic experiment path.
const RMDL_TRAIN_SPLIT: usize = 256;
const RMDL_VAL_SPLIT: usize = 64;

fn draw_splits(
    instance: &mut MDLInstance,
    train_size: usize,
    val_size: usize,
    seed: u64,
) -> Result<(Vec<Vec<Datapoint>>, Vec<Vec<Datapoint>>)> {
    let mut rng = substream(seed, STREAM_GENERATOR);
    let mut train = Vec::with_capacity(instance.n());
    let mut validation = Vec::with_capacity(instance.n());
    for i in 0..instance.n() {
        let dist = instance.distribution_mut(i)?;
        train.push((0..train_size).map(|_| dist.sample(&mut rng)).collect());
        validation.push((0..val_size).map(|_| dist.sample(&mut rng)).collect());
    }
    Ok((train, validation))
}

/// Runs the configured algorithm once per seed. Gaps are reported against
/// the exact optimum when one is certifiable and left out otherwise.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let (template, meta) = materialize(&config.instance)?;
    let opt = exact_opt(&template, meta.as_ref());
    config
        .seeds
        .par_iter()
        .enumerate()
        .map(|(idx, &seed)| {
            let mut instance = template.clone();
            let started = Instant::now();
            let output =
                run_one(config.algorithm, &mut instance, config.eps, config.delta, config.t_scale, seed)?;
            Ok(RunRecord {
                run_id: format!("r{idx:03}"),
                algorithm: config.algorithm.name().into(),
                n: instance.n(),
                size: space_size(&instance),
                eps_target: config.eps,
                samples_used: output.samples_used,
                opt_gap: opt.map(|o| output.worst_group_risk - o),
                worst_group_risk: output.worst_group_risk,
                wall_ms: started.elapsed().as_millis() as u64,
                seed,
            })
        })
        .collect()
}

/// First-success outcome of a doubling search.
#[derive(Clone, Copy, Debug)]
pub struct TargetSearch {
    pub samples: u64,
    pub achieved_gap: f64,
    pub worst_group_risk: f64,
}

/// Smallest doubling budget whose run lands within `eps` of `opt`, measured
/// as total samples. Each budget gets its own derived seed so failures are
/// independent retries, not reruns.
pub fn samples_to_target(
    algorithm: Algorithm,
    template: &MDLInstance,
    opt: f64,
    eps: f64,
    seed: u64,
) -> Result<TargetSearch> {
    match algorithm {
        Algorithm::Mdl | Algorithm::Gdro => {
            let mut t = SEARCH_START_ROUNDS;
            loop {
                let mut instance = template.clone();
                instance.reset_draws();
                let result = mdl_solve(&mut instance, t, derive_seed(seed, t), &SolveParams::default())?;
                let worst = solve_worst_risk(&instance, &result)?;
                let gap = worst - opt;
                if gap <= eps {
                    return Ok(TargetSearch {
                        samples: result.total_samples,
                        achieved_gap: gap,
                        worst_group_risk: worst,
                    });
                }
                if t >= SEARCH_CAP_ROUNDS {
                    return Err(Error::ResourceLimit(format!(
                        "no budget up to {t} rounds reached gap <= {eps} at seed {seed}"
                    )));
                }
                t *= 2;
            }
        }
        Algorithm::BatchErm => {
            let mut budget = SEARCH_START_BUDGET;
            loop {
                let mut instance = template.clone();
                instance.reset_draws();
                let outcome = batch_erm_baseline(&mut instance, budget, derive_seed(seed, budget as u64))?;
                let worst = model_worst_risk(&instance, &outcome.model)?;
                let gap = worst - opt;
                if gap <= eps {
                    return Ok(TargetSearch {
                        samples: outcome.samples_used,
                        achieved_gap: gap,
                        worst_group_risk: worst,
                    });
                }
                if budget >= SEARCH_CAP_BUDGET {
                    return Err(Error::ResourceLimit(format!(
                        "no per-distribution budget up to {budget} reached gap <= {eps} at seed {seed}"
                    )));
                }
                budget *= 2;
            }
        }
        Algorithm::Rmdl => Err(Error::invalid(
            "samples-to-target search supports the mdl, gdro, and batch-erm algorithms",
        )),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    N,
    Epsilon,
    ClassSize,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(SweepAxis::N),
            "epsilon" => Ok(SweepAxis::Epsilon),
            "class-size" => Ok(SweepAxis::ClassSize),
            other => Err(Error::Config {
                field: "axis".into(),
                message: format!("unknown axis `{other}`, expected n, epsilon, or class-size"),
            }),
        }
    }

    fn label(self) -> &'static str {
        match self {
            SweepAxis::N => "n",
            SweepAxis::Epsilon => "eps",
            SweepAxis::ClassSize => "k",
        }
    }
}

/// Applies one axis value to the instance spec a sweep varies.
fn apply_axis(spec: &InstanceSpec, axis: SweepAxis, value: f64) -> Result<InstanceSpec> {
    let as_count = |value: f64| -> Result<usize> {
        if value.fract() != 0.0 || value < 1.0 || value > u32::MAX as f64 {
            return Err(Error::invalid(format!("axis value {value} is not a positive integer")));
        }
        Ok(value as usize)
    };
    let mut spec = spec.clone();
    match axis {
        SweepAxis::Epsilon => {}
        SweepAxis::N => {
            let v = as_count(value)?;
            match &mut spec {
                InstanceSpec::RandomAgnostic { n, .. } | InstanceSpec::Realizable { n, .. } => *n = v,
                InstanceSpec::ConvexGdro { n, .. } => *n = v,
                InstanceSpec::Coins { eta, .. } => *eta = v,
                InstanceSpec::LowerBound { w, eta, .. } => {
                    if v % *w != 0 {
                        return Err(Error::invalid(format!(
                            "distribution count {v} is not a multiple of the feature count {w}"
                        )));
                    }
                    *eta = v / *w;
                }
            }
        }
        SweepAxis::ClassSize => {
            let v = as_count(value)?;
            match &mut spec {
                InstanceSpec::RandomAgnostic { class_size, .. }
                | InstanceSpec::Realizable { class_size, .. } => *class_size = v,
                _ => {
                    return Err(Error::invalid(
                        "the class-size axis needs a random-agnostic or realizable spec",
                    ))
                }
            }
        }
    }
    Ok(spec)
}

/// Repeats the experiment across an axis, recording samples-to-target per
/// seed instead of a fixed-budget run.
pub fn sweep(config: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<RunRecord>> {
    config.validate()?;
    if values.is_empty() {
        return Err(Error::invalid("a sweep needs at least one axis value"));
    }
    let base_spec = match (&config.instance, axis) {
        (_, SweepAxis::Epsilon) => None,
        (InstanceSource::Spec(spec), _) => Some(spec.clone()),
        (InstanceSource::File(_), _) => {
            return Err(Error::invalid(
                "sweeping n or class-size needs an inline instance spec, not a file",
            ))
        }
    };

    let mut points = Vec::with_capacity(values.len());
    for &value in values {
        let (template, meta, eps) = match axis {
            SweepAxis::Epsilon => {
                if !(value > 0.0 && value < 1.0) {
                    return Err(Error::invalid(format!(
                        "epsilon axis values must lie in (0, 1), got {value}"
                    )));
                }
                let (template, meta) = materialize(&config.instance)?;
                (template, meta, value)
            }
            _ => {
                let spec = apply_axis(base_spec.as_ref().unwrap(), axis, value)?;
                let (template, meta) = build_spec(&spec)?;
                (template, meta, config.eps)
            }
        };
        let opt = exact_opt(&template, meta.as_ref()).ok_or_else(|| {
            Error::UnsupportedExact(
                "samples-to-target needs an instance with a certifiable optimum".into(),
            )
        })?;
        points.push((value, template, opt, eps));
    }

    let tasks: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..config.seeds.len()).map(move |s| (p, s)))
        .collect();
    tasks
        .par_iter()
        .map(|&(p, s)| {
            let (value, template, opt, eps) = &points[p];
            let seed = config.seeds[s];
            let started = Instant::now();
            let search = samples_to_target(config.algorithm, template, *opt, *eps, seed)?;
            let value_text = if axis == SweepAxis::Epsilon {
                value.to_string()
            } else {
                format!("{}", *value as u64)
            };
            Ok(RunRecord {
                run_id: format!("{}{}-s{}", axis.label(), value_text, seed),
                algorithm: config.algorithm.name().into(),
                n: template.n(),
                size: space_size(template),
                eps_target: *eps,
                samples_used: search.samples,
                opt_gap: Some(search.achieved_gap),
                worst_group_risk: search.worst_group_risk,
                wall_ms: started.elapsed().as_millis() as u64,
                seed,
            })
        })
        .collect()
}

/// Head-to-head scaling study on the hard instance family: for every
/// distribution count, measures samples-to-target for on-demand solving and
/// the batch baseline on the same instances.
pub fn lower_bound_sweep(n_values: &[usize], eps: f64, seeds: &[u64]) -> Result<Vec<RunRecord>> {
    if n_values.is_empty() || seeds.is_empty() {
        return Err(Error::invalid("the scaling study needs distribution counts and seeds"));
    }
    let tasks: Vec<(usize, u64)> = n_values
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect();
    let per_pair: Result<Vec<Vec<RunRecord>>> = tasks
        .par_iter()
        .map(|&(n, seed)| {
            if n == 0 || n % 2 != 0 {
                return Err(Error::invalid("distribution counts must be positive and even"));
            }
            let spec = InstanceSpec::LowerBound {
                w: 2,
                eta: n / 2,
                eps,
                variant: mdlearn::LowerBoundVariant::Base,
            };
            let template = spec.build()?;
            let opt = brute_force_opt(&template)?.value;
            let mut records = Vec::with_capacity(2);
            for algorithm in [Algorithm::Mdl, Algorithm::BatchErm] {
                let started = Instant::now();
                let search = samples_to_target(algorithm, &template, opt, eps, seed)?;
                records.push(RunRecord {
                    run_id: format!("lb-n{n}-{}-s{seed}", algorithm.name()),
                    algorithm: algorithm.name().into(),
                    n,
                    size: space_size(&template),
                    eps_target: eps,
                    samples_used: search.samples,
                    opt_gap: Some(search.achieved_gap),
                    worst_group_risk: search.worst_group_risk,
                    wall_ms: started.elapsed().as_millis() as u64,
                    seed,
                });
            }
            Ok(records)
        })
        .collect();
    Ok(per_pair?.into_iter().flatten().collect())
}

/// Synthetic two-group task for the robust-training comparison: the groups
/// want opposite classifiers and the second is ten times rarer in pooled
/// data, so pooled fitting sacrifices it.
pub const POOLED_RARITY: [f64; 2] = [10.0 / 11.0, 1.0 / 11.0];

const TASK_ATOMS: usize = 12;
const TASK_FLIP: f64 = 0.05;

pub fn imbalanced_logistic_task(seed: u64) -> Result<MDLInstance> {
    let mut rng = substream(seed, STREAM_GENERATOR);
    let dists = [[1.0, 0.0], [-1.0, 0.0]]
        .iter()
        .map(|direction| {
            let mut atoms = Vec::with_capacity(2 * TASK_ATOMS);
            for _ in 0..TASK_ATOMS {
                // Unit-ball features correlated with the group's direction.
                let mut x = loop {
                    let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                    let along: f64 = x.iter().zip(direction).map(|(xi, d)| xi * d).sum();
                    if norm <= 1.0 && along > 0.3 {
                        break x;
                    }
                };
                let weight = 1.0 / TASK_ATOMS as f64;
                let mut flipped = x.clone();
                x.push(1.0);
                flipped.push(-1.0);
                atoms.push((Datapoint::Vector(x), weight * (1.0 - TASK_FLIP)));
                atoms.push((Datapoint::Vector(flipped), weight * TASK_FLIP));
            }
            DataDistribution::finite(atoms)
        })
        .collect::<Result<Vec<_>>>()?;
    MDLInstance::new(
        dists,
        vec![logistic_loss()?],
        HypothesisSpace::Convex(ConvexParamSpace::ball(2, 1.0)?),
    )
}

/// Matched per-group data budgets: robust training gets pooled-proportional
/// training splits plus equal validation splits; the pooled baseline gets
/// every point as one undifferentiated batch.
pub const TASK_TRAIN_SPLIT: [usize; 2] = [1000, 100];
pub const TASK_VAL_SPLIT: usize = 275;

#[derive(Clone, Debug)]
pub struct HeadToHead {
    pub rmdl_worst: f64,
    pub pooled_worst: f64,
    pub samples_each: u64,
}

pub fn rmdl_head_to_head(seed: u64) -> Result<HeadToHead> {
    let mut instance = imbalanced_logistic_task(seed)?;
    let mut rng = substream(derive_seed(seed, 1), STREAM_GENERATOR);
    let n = instance.n();
    let mut train = Vec::with_capacity(n);
    let mut validation = Vec::with_capacity(n);
    for i in 0..n {
        let dist = instance.distribution_mut(i)?;
        train.push((0..TASK_TRAIN_SPLIT[i]).map(|_| dist.sample(&mut rng)).collect::<Vec<_>>());
        validation.push((0..TASK_VAL_SPLIT).map(|_| dist.sample(&mut rng)).collect::<Vec<_>>());
    }
    let samples_each = instance.total_draws();

    let config = RmdlConfig { rounds: 128, train_batch: 16, val_batch: 16, ..Default::default() };
    let robust = rmdl_train(&instance, &train, &validation, &config, seed)?;
    let rmdl_worst = mdlearn::worst_support_risk(&instance, &robust.theta)?;

    // The pooled baseline sees the same points with group identity erased,
    // in the task's 10:1 pooled proportions.
    instance.reset_draws();
    let pooled_counts = [
        (samples_each as f64 * POOLED_RARITY[0]).round() as usize,
        samples_each as usize - (samples_each as f64 * POOLED_RARITY[0]).round() as usize,
    ];
    let mut pooled = Vec::with_capacity(samples_each as usize);
    let mut pool_rng = substream(derive_seed(seed, 2), STREAM_GENERATOR);
    for i in 0..n {
        let dist = instance.distribution_mut(i)?;
        pooled.extend((0..pooled_counts[i]).map(|_| dist.sample(&mut pool_rng)));
    }
    let theta = pooled_grid_minimizer(&instance, &pooled)?;
    let pooled_worst = mdlearn::worst_support_risk(&instance, &theta)?;
    Ok(HeadToHead { rmdl_worst, pooled_worst, samples_each })
}

/// Average empirical risk minimizer over a lattice on the unit disc.
fn pooled_grid_minimizer(instance: &MDLInstance, pooled: &[Datapoint]) -> Result<Vec<f64>> {
    let loss = instance.smooth_loss(0)?;
    let steps = 50;
    let mut best = (vec![0.0, 0.0], f64::INFINITY);
    for i in 0..=steps {
        for j in 0..=steps {
            let theta =
                vec![-1.0 + 2.0 * i as f64 / steps as f64, -1.0 + 2.0 * j as f64 / steps as f64];
            if theta.iter().map(|c| c * c).sum::<f64>() > 1.0 {
                continue;
            }
            let total: f64 = pooled.iter().map(|z| loss.value(&theta, z)).sum();
            if total < best.1 {
                best = (theta, total);
            }
        }
    }
    Ok(best.0)
}
