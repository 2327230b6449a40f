//! Batched empirical risk minimization baseline.
//!
//! The comparison point for on-demand sampling: draw a fixed budget from
//! every distribution up front, then pick the model with the best empirical
//! worst-group risk. Minimizing the worst group (not the average) makes the
//! baseline as strong as a batch method of this shape gets.

use crate::error::{Error, Result};
use crate::problem::{HypothesisSpace, MDLInstance};
use crate::rng::{substream, STREAM_LEARNER_SAMPLING};

/// What the baseline selected: a hypothesis index for finite classes, a grid
/// point for convex spaces.
#[derive(Clone, Debug, PartialEq)]
pub enum BatchErmModel {
    Hypothesis(usize),
    Point(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchErmOutcome {
    pub model: BatchErmModel,
    /// Exactly `n * per_distribution_budget`.
    pub samples_used: u64,
    /// Worst empirical group risk of the selected model.
    pub empirical_worst_risk: f64,
}

/// Grid resolution per axis for the convex-case minimizer.
const GRID_STEPS: usize = 50;
/// The grid grows as `GRID_STEPS^dim`; refuse beyond this.
const MAX_GRID_DIM: usize = 3;

/// Draws `per_distribution_budget` samples from every distribution, then
/// returns the empirical worst-group risk minimizer: the best hypothesis for
/// finite classes (ties to the lowest index), the best point of a fixed
/// parameter grid for convex spaces (capped at 3 dimensions).
pub fn batch_erm_baseline(
    instance: &mut MDLInstance,
    per_distribution_budget: usize,
    seed: u64,
) -> Result<BatchErmOutcome> {
    if per_distribution_budget == 0 {
        return Err(Error::invalid("the batch baseline needs a budget of at least 1 per distribution"));
    }
    let n = instance.n();
    let m = instance.m();
    let mut rng = substream(seed, STREAM_LEARNER_SAMPLING);
    let mut batches = Vec::with_capacity(n);
    for i in 0..n {
        let dist = instance.distribution_mut(i)?;
        let batch: Vec<_> = (0..per_distribution_budget).map(|_| dist.sample(&mut rng)).collect();
        batches.push(batch);
    }
    let samples_used = (n * per_distribution_budget) as u64;

    let (model, empirical_worst_risk) = match instance.space() {
        HypothesisSpace::Finite(class) => {
            let k = class.size();
            // sums[h][i * m + j] accumulates the losses of hypothesis h on
            // batch i under loss j.
            let mut sums = vec![vec![0.0f64; n * m]; k];
            for (i, batch) in batches.iter().enumerate() {
                for z in batch {
                    for j in 0..m {
                        let lv = instance.loss_vector(j, z)?;
                        for (h, &l) in lv.iter().enumerate() {
                            sums[h][i * m + j] += l;
                        }
                    }
                }
            }
            let scale = per_distribution_budget as f64;
            let mut best = (0usize, f64::INFINITY);
            for (h, row) in sums.iter().enumerate() {
                let worst = row.iter().fold(0.0f64, |a, &s| a.max(s / scale));
                if worst < best.1 {
                    best = (h, worst);
                }
            }
            (BatchErmModel::Hypothesis(best.0), best.1)
        }
        HypothesisSpace::Convex(space) => {
            let space = space.clone();
            if space.dim() > MAX_GRID_DIM {
                return Err(Error::ResourceLimit(format!(
                    "the grid baseline caps at {MAX_GRID_DIM} dimensions, got {}",
                    space.dim()
                )));
            }
            if m != 1 {
                return Err(Error::invalid("the convex baseline expects a single loss"));
            }
            let loss = instance.smooth_loss(0)?.clone();
            let mut best: (Vec<f64>, f64) = (space.center(), f64::INFINITY);
            for theta in grid_points(&space) {
                let mut worst = 0.0f64;
                for batch in &batches {
                    let total: f64 = batch.iter().map(|z| loss.value(&theta, z)).sum();
                    worst = worst.max(total / per_distribution_budget as f64);
                }
                if worst < best.1 {
                    best = (theta, worst);
                }
            }
            (BatchErmModel::Point(best.0), best.1)
        }
    };
    Ok(BatchErmOutcome { model, samples_used, empirical_worst_risk })
}

/// Feasible points of a regular lattice over the space's bounding box,
/// projected membership-checked rather than snapped.
fn grid_points(space: &crate::space::ConvexParamSpace) -> Vec<Vec<f64>> {
    let dim = space.dim();
    let center = space.center();
    let radius = space.norm_radius();
    // A box of half-width `radius` around the center encloses all three
    // supported geometries.
    let lo: Vec<f64> = center.iter().map(|c| c - radius).collect();
    let hi: Vec<f64> = center.iter().map(|c| c + radius).collect();
    let mut points = Vec::new();
    let mut index = vec![0usize; dim];
    loop {
        let theta: Vec<f64> = (0..dim)
            .map(|d| lo[d] + (hi[d] - lo[d]) * index[d] as f64 / GRID_STEPS as f64)
            .collect();
        if space.contains(&theta, 1e-9) {
            points.push(theta);
        }
        let mut d = 0;
        loop {
            if d == dim {
                return points;
            }
            index[d] += 1;
            if index[d] <= GRID_STEPS {
                break;
            }
            index[d] = 0;
            d += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DataDistribution, Datapoint};
    use crate::hypotheses::FiniteHypothesisClass;
    use crate::instances::make_random_agnostic;
    use crate::loss::{LossFunction, SmoothLoss};
    use crate::risk::{worst_case_risk, worst_support_risk, Predictor};
    use crate::space::ConvexParamSpace;

    #[test]
    fn sample_accounting_is_exact() {
        let mut inst = make_random_agnostic(4, 3, 3, 2).unwrap();
        let out = batch_erm_baseline(&mut inst, 7, 0).unwrap();
        assert_eq!(out.samples_used, 21);
        assert_eq!(inst.total_draws(), 21);
        assert_eq!(inst.draws_per_distribution(), vec![7, 7, 7]);
    }

    #[test]
    fn large_budgets_select_a_near_optimal_hypothesis() {
        let mut inst = make_random_agnostic(8, 3, 3, 5).unwrap();
        let best_pure = (0..8)
            .map(|h| worst_case_risk(&inst, &Predictor::Pure(h)).unwrap())
            .fold(f64::INFINITY, f64::min);
        let out = batch_erm_baseline(&mut inst, 2000, 1).unwrap();
        let BatchErmModel::Hypothesis(h) = out.model else { panic!() };
        let selected = worst_case_risk(&inst, &Predictor::Pure(h)).unwrap();
        assert!(
            selected <= best_pure + 0.05,
            "selected risk {selected} vs best pure {best_pure}"
        );
    }

    #[test]
    fn ties_go_to_the_lowest_index() {
        // Two identical hypotheses: their empirical risks agree on any batch.
        let class = FiniteHypothesisClass::new(vec![vec![1], vec![1]]).unwrap();
        let dist = DataDistribution::finite(vec![
            (Datapoint::discrete(0, 1).unwrap(), 0.5),
            (Datapoint::discrete(0, -1).unwrap(), 0.5),
        ])
        .unwrap();
        let mut inst = MDLInstance::new(
            vec![dist],
            vec![LossFunction::zero_one()],
            HypothesisSpace::Finite(class),
        )
        .unwrap();
        let out = batch_erm_baseline(&mut inst, 16, 3).unwrap();
        assert_eq!(out.model, BatchErmModel::Hypothesis(0));
    }

    #[test]
    fn convex_grid_matches_the_direct_grid_minimum() {
        let quad = LossFunction::Smooth(
            SmoothLoss::new(
                |theta: &[f64], z: &Datapoint| {
                    let Datapoint::Vector(c) = z else { panic!() };
                    0.5 * theta.iter().zip(c).map(|(t, ci)| (t - ci) * (t - ci)).sum::<f64>()
                },
                |theta: &[f64], z: &Datapoint| {
                    let Datapoint::Vector(c) = z else { panic!() };
                    theta.iter().zip(c).map(|(t, ci)| t - ci).collect()
                },
                std::f64::consts::SQRT_2,
            )
            .unwrap(),
        );
        let groups = vec![
            DataDistribution::finite(vec![(Datapoint::Vector(vec![0.0, 0.0]), 1.0)]).unwrap(),
            DataDistribution::finite(vec![(Datapoint::Vector(vec![1.0, 1.0]), 1.0)]).unwrap(),
        ];
        let mut inst = MDLInstance::new(
            groups,
            vec![quad],
            HypothesisSpace::Convex(
                ConvexParamSpace::axis_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
            ),
        )
        .unwrap();
        // Point-mass groups make the batches exact, so the baseline must
        // find the grid point nearest the true optimum (0.5, 0.5).
        let out = batch_erm_baseline(&mut inst, 3, 9).unwrap();
        let BatchErmModel::Point(theta) = out.model else { panic!() };
        let true_risk = worst_support_risk(&inst, &theta).unwrap();
        assert!((true_risk - 0.25).abs() <= 0.01, "risk {true_risk}");
        assert_eq!(out.samples_used, 6);
    }

    #[test]
    fn rejections() {
        let mut inst = make_random_agnostic(4, 2, 3, 2).unwrap();
        assert!(batch_erm_baseline(&mut inst, 0, 0).is_err());

        let quad = LossFunction::Smooth(
            SmoothLoss::new(|_: &[f64], _: &Datapoint| 0.0, |t: &[f64], _| vec![0.0; t.len()], 1.0)
                .unwrap(),
        );
        let mut high_dim = MDLInstance::new(
            vec![DataDistribution::finite(vec![(Datapoint::Vector(vec![0.0; 4]), 1.0)]).unwrap()],
            vec![quad],
            HypothesisSpace::Convex(ConvexParamSpace::ball(4, 1.0).unwrap()),
        )
        .unwrap();
        assert!(matches!(
            batch_erm_baseline(&mut high_dim, 1, 0),
            Err(Error::ResourceLimit(_))
        ));
    }
}
