//! No-regret game dynamics with on-demand sampling.
//!
//! [`solve_game`] runs a cost-minimizing player against a payoff-maximizing
//! player through noisy first-order oracles for a fixed number of rounds and
//! returns the averaged actions. [`mdl_solve`] instantiates that loop for an
//! [`MDLInstance`]: the learner sees one sampled loss gradient per round, the
//! auditor sees one sampled datapoint for its announced distribution cell,
//! and every draw is accounted for (exactly two per round).

use serde::{Deserialize, Serialize};

use rand_chacha::ChaCha8Rng;

use crate::data::Datapoint;
use crate::error::{Error, Result};
use crate::learners::{
    hedge_default_rate, BanditLearner, Hedge, OmdLearner, OnlineLearner, PartialFeedback,
    Partition,
};
use crate::problem::{HypothesisSpace, MDLInstance};
use crate::rng::{
    substream, STREAM_AUDITOR_ALGO, STREAM_AUDITOR_SAMPLING, STREAM_LEARNER_SAMPLING,
};
use crate::simplex::SimplexWeights;
use crate::space::NormPair;

/// Iteration budget sufficient for an epsilon-min-max equilibrium with
/// probability 1 - delta: `ceil((4 L^2 / eps^2) * (32 R^2 ln(2/delta) +
/// 25 gamma_minus + 25 gamma_plus))`.
///
/// `L` bounds the oracle estimates, `R` the largest action norm, and the
/// gammas are the two players' regret constants in the `regret <=
/// sqrt(gamma T)` convention.
pub fn required_iterations(
    eps: f64,
    delta: f64,
    l: f64,
    r: f64,
    gamma_minus: f64,
    gamma_plus: f64,
) -> Result<u64> {
    required_iterations_scaled(eps, delta, l, r, gamma_minus, gamma_plus, 1.0)
}

/// [`required_iterations`] times `t_scale`. The constants in the budget are
/// loose; sweeps and acceptance runs shrink them uniformly rather than
/// editing the formula.
pub fn required_iterations_scaled(
    eps: f64,
    delta: f64,
    l: f64,
    r: f64,
    gamma_minus: f64,
    gamma_plus: f64,
    t_scale: f64,
) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta must lie in (0, 1)"));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::invalid("oracle bound L must be positive"));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::invalid("action radius R must be >= 0"));
    }
    if !(gamma_minus >= 0.0 && gamma_plus >= 0.0) {
        return Err(Error::invalid("regret constants must be >= 0"));
    }
    if !(t_scale > 0.0) || !t_scale.is_finite() {
        return Err(Error::invalid("t_scale must be positive"));
    }
    let base = (4.0 * l * l / (eps * eps))
        * (32.0 * r * r * (2.0 / delta).ln() + 25.0 * gamma_minus + 25.0 * gamma_plus);
    Ok((base * t_scale).ceil() as u64)
}

/// A noisy first-order oracle: queried at the current action pair, returns an
/// unbiased gradient estimate with a declared norm bound. Estimates across
/// queries must be independent given independent rng streams.
pub trait FirstOrderOracle {
    fn query(
        &mut self,
        min_action: &[f64],
        max_action: &[f64],
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<f64>>;

    /// Bound `L` every estimate must satisfy.
    fn norm_bound(&self) -> f64;

    /// Which norm the bound is stated in (the action norm's dual).
    fn norm_pair(&self) -> NormPair;
}

fn estimate_norm(v: &[f64], pair: NormPair) -> f64 {
    match pair {
        NormPair::L1Linf => v.iter().fold(0.0f64, |a, &x| a.max(x.abs())),
        NormPair::L2L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
    }
}

fn verify_estimate(label: &str, v: &[f64], bound: f64, pair: NormPair) -> Result<()> {
    let norm = estimate_norm(v, pair);
    if !norm.is_finite() || norm > bound + 1e-9 {
        return Err(Error::ContractViolation(format!(
            "{label} oracle returned an estimate with norm {norm}, declared bound {bound}"
        )));
    }
    Ok(())
}

/// Per-round log entry of a solve run.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundLog {
    pub round: u64,
    pub min_action: Vec<f64>,
    pub max_action: Vec<f64>,
    /// Gradient estimate the min player was updated with.
    pub min_estimate: Vec<f64>,
    /// Flat pair indices whose payoffs the max player observed.
    pub observed_set: Vec<usize>,
    /// Payoff-as-cost values for `observed_set`, same order.
    pub observed_costs: Vec<f64>,
}

/// Outcome of a finished (or budget-interrupted) solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    /// Rounds actually played.
    pub rounds: u64,
    /// Samples drawn across all distributions.
    pub total_samples: u64,
    /// Samples drawn from each distribution, indexed like the instance.
    pub per_distribution_samples: Vec<u64>,
    /// Time-averaged learner action (hypothesis mixture or parameter point).
    pub avg_min_action: Vec<f64>,
    /// Time-averaged auditor mixture over (distribution, loss) pairs.
    pub avg_max_action: Vec<f64>,
    /// Seed the run was keyed on.
    pub seed: u64,
    /// Per-round log, kept only when requested; not serialized.
    #[serde(skip)]
    pub transcript: Option<Vec<RoundLog>>,
}

/// Saddle gap of a strategy pair on an explicit game matrix: best column
/// response to `p` minus best row response to `q`. Nonnegative for any
/// valid pair; zero exactly at a saddle point.
pub fn equilibrium_gap(matrix: &[Vec<f64>], p: &[f64], q: &[f64]) -> Result<f64> {
    let rows = matrix.len();
    if rows == 0 || matrix[0].is_empty() {
        return Err(Error::invalid("game matrix must be nonempty"));
    }
    let cols = matrix[0].len();
    if p.len() != rows || q.len() != cols {
        return Err(Error::invalid("strategy dimensions do not match the matrix"));
    }
    let best_col = (0..cols)
        .map(|j| (0..rows).map(|i| p[i] * matrix[i][j]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let best_row = (0..rows)
        .map(|i| (0..cols).map(|j| q[j] * matrix[i][j]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok(best_col - best_row)
}

/// Runs `t` rounds of no-regret dynamics between the two players and returns
/// their averaged actions.
///
/// The min player observes the min oracle's estimates directly; the max
/// player maximizes, so its estimates enter negated. Oracles draw from the
/// run's two sampling substreams. This loop knows nothing about example
/// oracles, so the sample counters in the result are zero; [`mdl_solve`]
/// fills them in.
pub fn solve_game(
    min_oracle: &mut dyn FirstOrderOracle,
    max_oracle: &mut dyn FirstOrderOracle,
    min_player: &mut dyn OnlineLearner,
    max_player: &mut dyn OnlineLearner,
    t: u64,
    seed: u64,
    record_transcript: bool,
) -> Result<SolveResult> {
    if t == 0 {
        return Err(Error::invalid("solve_game needs T >= 1"));
    }
    let mut rng_min = substream(seed, STREAM_LEARNER_SAMPLING);
    let mut rng_max = substream(seed, STREAM_AUDITOR_SAMPLING);
    let mut avg_min = vec![0.0; min_player.dim()];
    let mut avg_max = vec![0.0; max_player.dim()];
    let mut transcript = record_transcript.then(Vec::new);

    for round in 1..=t {
        let a = min_player.action();
        let b = max_player.action();
        let g_min = min_oracle.query(&a, &b, &mut rng_min)?;
        verify_estimate("min", &g_min, min_oracle.norm_bound(), min_oracle.norm_pair())?;
        let g_max = max_oracle.query(&a, &b, &mut rng_max)?;
        verify_estimate("max", &g_max, max_oracle.norm_bound(), max_oracle.norm_pair())?;

        min_player.observe(&g_min)?;
        let negated: Vec<f64> = g_max.iter().map(|v| -v).collect();
        max_player.observe(&negated)?;

        for (acc, v) in avg_min.iter_mut().zip(&a) {
            *acc += v;
        }
        for (acc, v) in avg_max.iter_mut().zip(&b) {
            *acc += v;
        }
        if let Some(rows) = &mut transcript {
            rows.push(RoundLog {
                round,
                min_action: a,
                max_action: b,
                min_estimate: g_min,
                observed_set: (0..max_player.dim()).collect(),
                observed_costs: g_max,
            });
        }
    }

    let scale = t as f64;
    Ok(SolveResult {
        rounds: t,
        total_samples: 0,
        per_distribution_samples: Vec::new(),
        avg_min_action: avg_min.into_iter().map(|v| v / scale).collect(),
        avg_max_action: avg_max.into_iter().map(|v| v / scale).collect(),
        seed,
        transcript,
    })
}

/// Gradient estimate for the learner: samples one (distribution, loss) pair
/// from the auditor's mixture, draws one datapoint from that distribution,
/// and returns the per-hypothesis loss vector (finite class) or the smooth
/// loss gradient at the current parameters (convex class).
#[derive(Clone, Debug)]
pub struct LearnerEstimate {
    pub gradient: Vec<f64>,
    pub pair: (usize, usize),
}

pub fn learner_gradient_estimate(
    instance: &mut MDLInstance,
    learner_action: &[f64],
    auditor_action: &SimplexWeights,
    rng: &mut ChaCha8Rng,
) -> Result<LearnerEstimate> {
    if auditor_action.len() != instance.n() * instance.m() {
        return Err(Error::invalid(format!(
            "auditor mixture has {} entries, instance has {} pairs",
            auditor_action.len(),
            instance.n() * instance.m()
        )));
    }
    let flat = auditor_action.sample_index(rng);
    let (i, j) = instance.pair_of(flat);
    let z = instance.distribution_mut(i)?.sample(rng);
    let gradient = match instance.space() {
        HypothesisSpace::Finite(_) => instance.loss_vector(j, &z)?,
        HypothesisSpace::Convex(space) => {
            let loss = instance.smooth_loss(j)?;
            let g = loss.gradient(learner_action, &z);
            verify_estimate("learner", &g, loss.norm_bound(), space.norm_pair())?;
            g
        }
    };
    Ok(LearnerEstimate { gradient, pair: (i, j) })
}

/// Payoff estimate for the auditor on an observed set of flat pair indices:
/// one datapoint per unique distribution in the set, cost `1 - loss` for
/// each pair evaluated on its distribution's datapoint.
#[derive(Clone, Debug)]
pub struct AuditorEstimate {
    pub observed_set: Vec<usize>,
    pub costs: Vec<f64>,
    /// Datapoints drawn (= number of unique distributions in the set).
    pub draws: u64,
}

pub fn auditor_payoff_estimate(
    instance: &mut MDLInstance,
    learner_action: &[f64],
    observe: &[usize],
    rng: &mut ChaCha8Rng,
) -> Result<AuditorEstimate> {
    if observe.is_empty() {
        return Err(Error::invalid("observe set must be nonempty"));
    }
    let pairs = instance.n() * instance.m();
    let mut unique: Vec<usize> = Vec::new();
    for &flat in observe {
        if flat >= pairs {
            return Err(Error::invalid(format!("pair index {flat} out of range")));
        }
        let (i, _) = instance.pair_of(flat);
        if !unique.contains(&i) {
            unique.push(i);
        }
    }
    unique.sort_unstable();
    let mut samples: Vec<(usize, Datapoint)> = Vec::with_capacity(unique.len());
    for &i in &unique {
        let z = instance.distribution_mut(i)?.sample(rng);
        samples.push((i, z));
    }
    let mut costs = Vec::with_capacity(observe.len());
    for &flat in observe {
        let (i, j) = instance.pair_of(flat);
        let z = &samples.iter().find(|(d, _)| *d == i).expect("sampled above").1;
        let loss = instance.point_loss(j, learner_action, z)?;
        let cost = 1.0 - loss;
        if !(-1e-9..=1.0 + 1e-9).contains(&cost) {
            return Err(Error::invalid(format!(
                "auditor cost {cost} outside [0, 1]; losses must be normalized"
            )));
        }
        costs.push(cost.clamp(0.0, 1.0));
    }
    Ok(AuditorEstimate { observed_set: observe.to_vec(), costs, draws: unique.len() as u64 })
}

/// Knobs for [`mdl_solve`]. `Default` picks the theory-backed rates from `T`
/// and the instance geometry.
#[derive(Clone, Debug, Default)]
pub struct SolveParams {
    /// Learner step size; defaults to `sqrt(ln|H| / T)` for a finite class
    /// and `sqrt(2 D / (L^2 T))` for mirror descent with Bregman radius `D`.
    pub learner_rate: Option<f64>,
    /// Auditor exponential-weights rate; defaults to `sqrt(ln(nm) / T)`.
    pub auditor_rate: Option<f64>,
    /// Auditor implicit-exploration size; defaults to `sqrt(ln(nm) / (n T))`.
    pub lambda: Option<f64>,
    /// Keep the per-round log on the result.
    pub record_transcript: bool,
    /// Abort with a partial result once the next round would push total
    /// draws past this limit.
    pub sample_budget: Option<u64>,
}

enum MinPlayer {
    Finite(Hedge),
    Convex(OmdLearner),
}

impl MinPlayer {
    fn action(&self) -> Vec<f64> {
        match self {
            MinPlayer::Finite(h) => h.weights().into_vec(),
            MinPlayer::Convex(o) => o.theta().to_vec(),
        }
    }

    fn dim(&self) -> usize {
        match self {
            MinPlayer::Finite(h) => h.k(),
            MinPlayer::Convex(o) => o.space().dim(),
        }
    }

    fn observe(&mut self, gradient: &[f64]) -> Result<()> {
        match self {
            MinPlayer::Finite(h) => h.update(gradient).map(drop),
            MinPlayer::Convex(o) => o.observe(gradient),
        }
    }
}

/// Solves a multi-distribution instance by `t` rounds of learner/auditor
/// dynamics with on-demand sampling.
///
/// Each round: the auditor announces a distribution cell and plays a mixture
/// over (distribution, loss) pairs; the learner draws one datapoint through
/// the auditor's mixture and updates on its gradient; the auditor draws one
/// datapoint for the announced cell and updates on the observed payoffs.
/// Total draws come to exactly `2t`. Identical `(instance, t, seed, params)`
/// reproduce the result bit for bit.
pub fn mdl_solve(
    instance: &mut MDLInstance,
    t: u64,
    seed: u64,
    params: &SolveParams,
) -> Result<SolveResult> {
    if t == 0 {
        return Err(Error::invalid("mdl_solve needs T >= 1"));
    }
    let n = instance.n();
    let m = instance.m();
    let pairs = n * m;
    let start_draws = instance.draws_per_distribution();

    let auditor_rate = match params.auditor_rate {
        Some(r) => r,
        None if pairs >= 2 => hedge_default_rate(pairs, t)?,
        None => 1.0,
    };
    let lambda = match params.lambda {
        Some(l) => l,
        None if pairs >= 2 => BanditLearner::default_lambda(pairs, n, t)?,
        None => 0.0,
    };
    let mut auditor = BanditLearner::elp(
        Partition::grouped(n, m)?,
        auditor_rate,
        lambda,
        substream(seed, STREAM_AUDITOR_ALGO),
    )?;

    let mut learner = match instance.space() {
        HypothesisSpace::Finite(class) => {
            let k = class.size();
            let rate = match params.learner_rate {
                Some(r) => r,
                None if k >= 2 => hedge_default_rate(k, t)?,
                None => 1.0,
            };
            MinPlayer::Finite(Hedge::new(k, rate)?)
        }
        HypothesisSpace::Convex(space) => {
            let mut l: f64 = 0.0;
            for j in 0..m {
                l = l.max(instance.smooth_loss(j)?.norm_bound());
            }
            let rate = params
                .learner_rate
                .unwrap_or_else(|| (2.0 * space.bregman_radius() / (l * l * t as f64)).sqrt());
            MinPlayer::Convex(OmdLearner::new(space.clone(), rate)?)
        }
    };

    let mut rng_learner = substream(seed, STREAM_LEARNER_SAMPLING);
    let mut rng_auditor = substream(seed, STREAM_AUDITOR_SAMPLING);
    let mut avg_min = vec![0.0; learner.dim()];
    let mut avg_max = vec![0.0; pairs];
    let mut transcript = params.record_transcript.then(Vec::new);
    let mut feedback: Option<PartialFeedback> = None;
    let mut used: u64 = 0;

    for round in 1..=t {
        let fb = feedback.take();
        let step = auditor.step(fb.as_ref())?;
        let min_action = learner.action();

        // The announced cell costs one draw per unique distribution in it
        // (one, for the by-distribution partition) plus the learner's one.
        let mut cell_dists: Vec<usize> =
            step.observe.iter().map(|&f| instance.pair_of(f).0).collect();
        cell_dists.dedup();
        let round_cost = 1 + cell_dists.len() as u64;
        if let Some(budget) = params.sample_budget {
            if used + round_cost > budget {
                let partial = assemble(
                    instance,
                    &start_draws,
                    round - 1,
                    &avg_min,
                    &avg_max,
                    seed,
                    transcript,
                    Some((&learner, &auditor)),
                );
                return Err(Error::BudgetExhausted { partial: Box::new(partial) });
            }
        }

        let learner_est =
            learner_gradient_estimate(instance, &min_action, &step.action, &mut rng_learner)?;
        let auditor_est =
            auditor_payoff_estimate(instance, &min_action, &step.observe, &mut rng_auditor)?;
        used += 1 + auditor_est.draws;

        learner.observe(&learner_est.gradient)?;
        feedback = Some(PartialFeedback {
            observed_set: auditor_est.observed_set.clone(),
            observed_costs: auditor_est.costs.clone(),
        });

        for (acc, v) in avg_min.iter_mut().zip(&min_action) {
            *acc += v;
        }
        for (acc, v) in avg_max.iter_mut().zip(step.action.as_slice()) {
            *acc += v;
        }
        if let Some(rows) = &mut transcript {
            rows.push(RoundLog {
                round,
                min_action,
                max_action: step.action.into_vec(),
                min_estimate: learner_est.gradient,
                observed_set: auditor_est.observed_set,
                observed_costs: auditor_est.costs,
            });
        }
    }

    Ok(assemble(instance, &start_draws, t, &avg_min, &avg_max, seed, transcript, None))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    instance: &MDLInstance,
    start_draws: &[u64],
    completed: u64,
    avg_min: &[f64],
    avg_max: &[f64],
    seed: u64,
    transcript: Option<Vec<RoundLog>>,
    zero_round_state: Option<(&MinPlayer, &BanditLearner)>,
) -> SolveResult {
    let per: Vec<u64> = instance
        .draws_per_distribution()
        .iter()
        .zip(start_draws)
        .map(|(now, was)| now - was)
        .collect();
    let total = per.iter().sum();
    let (avg_min_action, avg_max_action) = if completed == 0 {
        // No round finished; report the players' starting actions.
        match zero_round_state {
            Some((learner, auditor)) => (learner.action(), auditor.weights().into_vec()),
            None => (avg_min.to_vec(), avg_max.to_vec()),
        }
    } else {
        let scale = completed as f64;
        (
            avg_min.iter().map(|v| v / scale).collect(),
            avg_max.iter().map(|v| v / scale).collect(),
        )
    };
    SolveResult {
        rounds: completed,
        total_samples: total,
        per_distribution_samples: per,
        avg_min_action,
        avg_max_action,
        seed,
        transcript,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DataDistribution;
    use crate::hypotheses::FiniteHypothesisClass;
    use crate::loss::{LossFunction, TableLoss};
    use crate::minimax::{optimality_gap, risk_matrix};
    use crate::risk::{exact_risk, Predictor};

    fn coin(p_plus: f64) -> DataDistribution {
        DataDistribution::finite(vec![
            (Datapoint::discrete(0, 1).unwrap(), p_plus),
            (Datapoint::discrete(0, -1).unwrap(), 1.0 - p_plus),
        ])
        .unwrap()
    }

    fn coin_instance(probs: &[f64]) -> MDLInstance {
        let class = FiniteHypothesisClass::all_labelings(1).unwrap();
        MDLInstance::new(
            probs.iter().map(|&p| coin(p)).collect(),
            vec![LossFunction::zero_one()],
            HypothesisSpace::Finite(class),
        )
        .unwrap()
    }

    #[test]
    fn iteration_budget_matches_frozen_value() {
        assert_eq!(required_iterations(0.1, 0.05, 1.0, 1.0, 0.0, 0.0).unwrap(), 47218);
    }

    #[test]
    fn iteration_budget_scales_with_l_squared() {
        let one = required_iterations(0.1, 0.05, 1.0, 1.0, 0.0, 0.0).unwrap();
        let two = required_iterations(0.1, 0.05, 2.0, 1.0, 0.0, 0.0).unwrap();
        assert!((two as i64 - 4 * one as i64).abs() <= 3, "{two} vs 4x{one}");
    }

    #[test]
    fn zero_radius_and_zero_gamma_need_no_rounds() {
        assert_eq!(required_iterations(0.5, 0.5, 1.0, 0.0, 0.0, 0.0).unwrap(), 0);
    }

    #[test]
    fn iteration_budget_rejects_bad_ranges() {
        assert!(required_iterations(0.0, 0.1, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(required_iterations(0.1, 1.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(required_iterations(0.1, 0.1, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(required_iterations_scaled(0.1, 0.1, 1.0, 1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn point_mass_auditor_always_samples_its_pair() {
        let mut inst = coin_instance(&[0.2, 0.8]);
        let auditor = SimplexWeights::delta(2, 1).unwrap();
        let mut rng = substream(3, STREAM_LEARNER_SAMPLING);
        for _ in 0..50 {
            let est =
                learner_gradient_estimate(&mut inst, &[0.5, 0.5], &auditor, &mut rng).unwrap();
            assert_eq!(est.pair, (1, 0));
        }
        assert_eq!(inst.draws_per_distribution(), vec![0, 50]);
    }

    #[test]
    fn zero_loss_table_gives_zero_gradient() {
        let class = FiniteHypothesisClass::all_labelings(1).unwrap();
        let table = TableLoss::explicit(vec![vec![[0.0, 0.0]], vec![[0.0, 0.0]]]).unwrap();
        let mut inst = MDLInstance::new(
            vec![coin(0.5)],
            vec![LossFunction::Table(table)],
            HypothesisSpace::Finite(class),
        )
        .unwrap();
        let auditor = SimplexWeights::uniform(1).unwrap();
        let mut rng = substream(4, STREAM_LEARNER_SAMPLING);
        let est = learner_gradient_estimate(&mut inst, &[0.5, 0.5], &auditor, &mut rng).unwrap();
        assert_eq!(est.gradient, vec![0.0, 0.0]);
    }

    #[test]
    fn learner_estimate_mean_matches_exact_gradient() {
        let mut inst = coin_instance(&[0.3, 0.8]);
        let auditor = SimplexWeights::new(vec![0.3, 0.7]).unwrap();
        let k = inst.learner_dim();
        let rounds = 100_000usize;
        let mut rng = substream(12, STREAM_LEARNER_SAMPLING);
        let mut sum = vec![0.0f64; k];
        let mut sum_sq = vec![0.0f64; k];
        for _ in 0..rounds {
            let est =
                learner_gradient_estimate(&mut inst, &[0.5, 0.5], &auditor, &mut rng).unwrap();
            for i in 0..k {
                sum[i] += est.gradient[i];
                sum_sq[i] += est.gradient[i] * est.gradient[i];
            }
        }
        // Exact mixture gradient: sum over pairs of auditor weight times the
        // per-hypothesis risk under that pair.
        let mut exact = vec![0.0f64; k];
        for flat in 0..2 {
            let (i, j) = inst.pair_of(flat);
            for h in 0..k {
                exact[h] +=
                    auditor.get(flat) * exact_risk(&inst, &Predictor::Pure(h), i, j).unwrap();
            }
        }
        for i in 0..k {
            let mean = sum[i] / rounds as f64;
            let var = (sum_sq[i] / rounds as f64 - mean * mean).max(0.0);
            let sigma = (var / rounds as f64).sqrt();
            assert!(
                (mean - exact[i]).abs() <= 3.0 * sigma + 1e-12,
                "component {i}: mean {mean} exact {} sigma {sigma}",
                exact[i]
            );
        }
    }

    #[test]
    fn one_cell_observation_draws_one_datapoint() {
        let class = FiniteHypothesisClass::all_labelings(1).unwrap();
        let mut inst = MDLInstance::new(
            vec![coin(0.4), coin(0.9)],
            vec![LossFunction::zero_one(), LossFunction::zero_one()],
            HypothesisSpace::Finite(class),
        )
        .unwrap();
        let mut rng = substream(5, STREAM_AUDITOR_SAMPLING);
        // Cell of distribution 1 under m=2: flat pairs {2, 3}.
        let est = auditor_payoff_estimate(&mut inst, &[0.5, 0.5], &[2, 3], &mut rng).unwrap();
        assert_eq!(est.draws, 1);
        assert_eq!(est.costs.len(), 2);
        assert_eq!(inst.draws_per_distribution(), vec![0, 1]);
    }

    #[test]
    fn identically_one_loss_gives_zero_costs() {
        let class = FiniteHypothesisClass::all_labelings(1).unwrap();
        let table = TableLoss::explicit(vec![vec![[1.0, 1.0]], vec![[1.0, 1.0]]]).unwrap();
        let mut inst = MDLInstance::new(
            vec![coin(0.5)],
            vec![LossFunction::Table(table)],
            HypothesisSpace::Finite(class),
        )
        .unwrap();
        let mut rng = substream(6, STREAM_AUDITOR_SAMPLING);
        let est = auditor_payoff_estimate(&mut inst, &[0.5, 0.5], &[0], &mut rng).unwrap();
        assert_eq!(est.costs, vec![0.0]);
    }

    #[test]
    fn auditor_estimate_mean_matches_exact_payoff() {
        let mut inst = coin_instance(&[0.3]);
        let weights = [0.25, 0.75];
        let rounds = 100_000usize;
        let mut rng = substream(13, STREAM_AUDITOR_SAMPLING);
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        for _ in 0..rounds {
            let est = auditor_payoff_estimate(&mut inst, &weights, &[0], &mut rng).unwrap();
            sum += est.costs[0];
            sum_sq += est.costs[0] * est.costs[0];
        }
        let mean = sum / rounds as f64;
        let w = SimplexWeights::new(weights.to_vec()).unwrap();
        let exact = 1.0 - exact_risk(&inst, &Predictor::Mixed(&w), 0, 0).unwrap();
        let var = (sum_sq / rounds as f64 - mean * mean).max(0.0);
        let sigma = (var / rounds as f64).sqrt();
        assert!((mean - exact).abs() <= 3.0 * sigma + 1e-12, "mean {mean} exact {exact}");
    }

    struct MatrixOracle {
        matrix: Vec<Vec<f64>>,
        for_max_player: bool,
        bound: f64,
    }

    impl FirstOrderOracle for MatrixOracle {
        fn query(
            &mut self,
            min_action: &[f64],
            max_action: &[f64],
            _rng: &mut ChaCha8Rng,
        ) -> Result<Vec<f64>> {
            let rows = self.matrix.len();
            let cols = self.matrix[0].len();
            Ok(if self.for_max_player {
                (0..cols)
                    .map(|j| (0..rows).map(|i| min_action[i] * self.matrix[i][j]).sum())
                    .collect()
            } else {
                (0..rows)
                    .map(|i| (0..cols).map(|j| self.matrix[i][j] * max_action[j]).sum())
                    .collect()
            })
        }

        fn norm_bound(&self) -> f64 {
            self.bound
        }

        fn norm_pair(&self) -> NormPair {
            NormPair::L1Linf
        }
    }

    fn play_matrix_game(matrix: Vec<Vec<f64>>, t: u64, seed: u64) -> SolveResult {
        let rows = matrix.len();
        let cols = matrix[0].len();
        let mut min_oracle =
            MatrixOracle { matrix: matrix.clone(), for_max_player: false, bound: 1.0 };
        let mut max_oracle = MatrixOracle { matrix, for_max_player: true, bound: 1.0 };
        let mut min_player = Hedge::new(rows, hedge_default_rate(rows.max(2), t).unwrap()).unwrap();
        let mut max_player = Hedge::new(cols, hedge_default_rate(cols.max(2), t).unwrap()).unwrap();
        solve_game(
            &mut min_oracle,
            &mut max_oracle,
            &mut min_player,
            &mut max_player,
            t,
            seed,
            false,
        )
        .unwrap()
    }

    #[test]
    fn matching_pennies_dynamics_reach_the_known_equilibrium() {
        let result = play_matrix_game(vec![vec![0.0, 1.0], vec![1.0, 0.0]], 4096, 1);
        for v in result.avg_min_action.iter().chain(&result.avg_max_action) {
            assert!((v - 0.5).abs() <= 0.05, "averaged action {v} off equilibrium");
        }
    }

    #[test]
    fn constant_payoff_game_closes_with_zero_gap() {
        let matrix = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let result = play_matrix_game(matrix.clone(), 32, 2);
        let gap =
            equilibrium_gap(&matrix, &result.avg_min_action, &result.avg_max_action).unwrap();
        assert!(gap.abs() <= 1e-9);
    }

    #[test]
    fn single_action_max_player_reduces_to_minimization() {
        let matrix = vec![vec![0.9], vec![0.2], vec![0.5]];
        let result = play_matrix_game(matrix.clone(), 2048, 3);
        let payoff: f64 =
            (0..3).map(|i| result.avg_min_action[i] * matrix[i][0]).sum();
        assert!(payoff <= 0.2 + 0.05, "averaged payoff {payoff}");
    }

    #[test]
    fn lying_oracle_aborts_the_run() {
        struct Liar;
        impl FirstOrderOracle for Liar {
            fn query(&mut self, _: &[f64], _: &[f64], _: &mut ChaCha8Rng) -> Result<Vec<f64>> {
                Ok(vec![1.0, 0.0])
            }
            fn norm_bound(&self) -> f64 {
                0.5
            }
            fn norm_pair(&self) -> NormPair {
                NormPair::L1Linf
            }
        }
        let mut a = Liar;
        let mut b = Liar;
        let mut p1 = Hedge::new(2, 0.1).unwrap();
        let mut p2 = Hedge::new(2, 0.1).unwrap();
        let err = solve_game(&mut a, &mut b, &mut p1, &mut p2, 4, 0, false).unwrap_err();
        assert!(matches!(err, Error::ContractViolation(_)));
    }

    #[test]
    fn every_run_draws_exactly_two_samples_per_round() {
        for (probs, losses) in [
            (vec![0.3, 0.8], vec![LossFunction::zero_one()]),
            (vec![0.3, 0.8, 0.5], vec![LossFunction::zero_one(), LossFunction::zero_one()]),
        ] {
            let class = FiniteHypothesisClass::all_labelings(1).unwrap();
            let mut inst = MDLInstance::new(
                probs.iter().map(|&p| coin(p)).collect(),
                losses,
                HypothesisSpace::Finite(class),
            )
            .unwrap();
            let t = 37;
            let result = mdl_solve(&mut inst, t, 9, &SolveParams::default()).unwrap();
            assert_eq!(result.rounds, t);
            assert_eq!(result.total_samples, 2 * t);
            assert_eq!(result.per_distribution_samples.iter().sum::<u64>(), 2 * t);
            let mass: f64 = result.avg_max_action.iter().sum();
            assert!((mass - 1.0).abs() < 1e-12);
            let mass: f64 = result.avg_min_action.iter().sum();
            assert!((mass - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_seeds_reproduce_the_result_bit_for_bit() {
        let run = |seed: u64| {
            let mut inst = coin_instance(&[0.2, 0.7, 0.5]);
            let params = SolveParams { record_transcript: true, ..Default::default() };
            mdl_solve(&mut inst, 200, seed, &params).unwrap()
        };
        let a = run(42);
        let b = run(42);
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn two_hypothesis_instance_concentrates_on_the_low_risk_one() {
        // Coin with Pr(+1) = 0.9: predicting -1 risks 0.9, predicting +1
        // risks 0.1. The averaged mixture should sit on the second.
        let mut total = 0.0;
        let seeds = 10;
        for seed in 0..seeds {
            let mut inst = coin_instance(&[0.9]);
            let result = mdl_solve(&mut inst, 2000, seed, &SolveParams::default()).unwrap();
            total += result.avg_min_action[1];
        }
        let mean = total / seeds as f64;
        assert!(mean >= 0.9, "averaged weight on the good hypothesis: {mean}");
    }

    #[test]
    fn measured_equilibrium_gap_certifies_twice_optimality() {
        let mut inst = coin_instance(&[0.3, 0.6, 0.9]);
        let result = mdl_solve(&mut inst, 2000, 5, &SolveParams::default()).unwrap();
        let matrix = risk_matrix(&inst).unwrap();
        let g =
            equilibrium_gap(&matrix, &result.avg_min_action, &result.avg_max_action).unwrap();
        let mix = SimplexWeights::new(result.avg_min_action.clone()).unwrap();
        let gap = optimality_gap(&inst, &Predictor::Mixed(&mix)).unwrap();
        assert!(gap <= 2.0 * g + 1e-9, "optimality gap {gap} vs equilibrium gap {g}");
    }

    #[test]
    fn sample_budget_interrupts_with_a_partial_result() {
        let mut inst = coin_instance(&[0.2, 0.7]);
        let params = SolveParams {
            sample_budget: Some(21),
            record_transcript: true,
            ..Default::default()
        };
        let err = mdl_solve(&mut inst, 1000, 8, &params).unwrap_err();
        let Error::BudgetExhausted { partial } = err else {
            panic!("expected budget exhaustion");
        };
        assert_eq!(partial.rounds, 10);
        assert_eq!(partial.total_samples, 20);
        assert_eq!(partial.transcript.as_ref().unwrap().len(), 10);
        let mass: f64 = partial.avg_min_action.iter().sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_round_budget_reports_starting_actions() {
        let mut inst = coin_instance(&[0.2, 0.7]);
        let params = SolveParams { sample_budget: Some(1), ..Default::default() };
        let err = mdl_solve(&mut inst, 10, 3, &params).unwrap_err();
        let Error::BudgetExhausted { partial } = err else {
            panic!("expected budget exhaustion");
        };
        assert_eq!(partial.rounds, 0);
        assert_eq!(partial.total_samples, 0);
        assert_eq!(partial.avg_min_action, vec![0.5, 0.5]);
    }

    #[test]
    fn estimated_regret_tracks_true_regret_across_seeds() {
        // On a fixed small game, the learner's regret against the exact
        // expected costs should not exceed its regret against the sampled
        // estimates by more than the concentration allowance
        // 4 L sqrt(T) (R sqrt(2 ln(1/delta)) + sqrt(gamma)) at delta = 0.01.
        let t = 256u64;
        let k = 2usize;
        let gamma = 4.0 * (k as f64).ln();
        let allowance =
            4.0 * (t as f64).sqrt() * ((2.0 * (1.0f64 / 0.01).ln()).sqrt() + gamma.sqrt());
        let mut violations = 0;
        for seed in 0..100 {
            let mut inst = coin_instance(&[0.25, 0.75]);
            let params = SolveParams { record_transcript: true, ..Default::default() };
            let result = mdl_solve(&mut inst, t, seed, &params).unwrap();
            let rows = result.transcript.as_ref().unwrap();
            let matrix = risk_matrix(&inst).unwrap();
            let mut est_incurred = 0.0;
            let mut est_cum = vec![0.0f64; k];
            let mut true_incurred = 0.0;
            let mut true_cum = vec![0.0f64; k];
            for row in rows {
                for h in 0..k {
                    let est = row.min_estimate[h];
                    est_incurred += row.min_action[h] * est;
                    est_cum[h] += est;
                    let truth: f64 =
                        (0..2).map(|flat| row.max_action[flat] * matrix[h][flat]).sum();
                    true_incurred += row.min_action[h] * truth;
                    true_cum[h] += truth;
                }
            }
            let est_regret =
                est_incurred - est_cum.iter().cloned().fold(f64::INFINITY, f64::min);
            let true_regret =
                true_incurred - true_cum.iter().cloned().fold(f64::INFINITY, f64::min);
            if true_regret > est_regret + allowance {
                violations += 1;
            }
        }
        assert!(violations <= 1, "{violations} seeds broke the concentration allowance");
    }
}
