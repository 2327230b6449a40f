//! Problem transformations.
//!
//! [`relax_collaborative`] lifts a finite-class instance to the simplex over
//! hypotheses with the induced linear losses, so the convex machinery applies
//! and any epsilon-optimal mixture transfers back as an epsilon-optimal
//! randomized predictor. [`majority_vote`] derandomizes a mixture into one
//! deterministic classifier at a factor-2 cost in worst-case risk.
//! [`project_class`] builds the finite class induced by a VC family on a
//! sample, the epsilon-net mechanism behind the infinite-class extension.

use std::collections::BTreeSet;

use crate::data::Datapoint;
use crate::error::{Error, Result};
use crate::hypotheses::FiniteHypothesisClass;
use crate::loss::{LossFunction, SmoothLoss};
use crate::problem::{HypothesisSpace, MDLInstance};
use crate::simplex::SimplexWeights;
use crate::space::ConvexParamSpace;

/// Lifts a finite-class instance to the probability simplex over its
/// hypotheses. Each table loss becomes the linear loss `l(w, z) = sum_h w_h
/// l(h, z)`; its gradient at any point is the per-hypothesis loss column, so
/// the declared max-norm bound is 1. Distributions carry over unchanged.
pub fn relax_collaborative(instance: &MDLInstance) -> Result<MDLInstance> {
    let class = match instance.space() {
        HypothesisSpace::Finite(c) => c,
        HypothesisSpace::Convex(_) => {
            return Err(Error::UnsupportedExact(
                "relaxation starts from a finite hypothesis class".into(),
            ))
        }
    };
    let k = class.size();
    let features = class.features();

    let mut losses = Vec::with_capacity(instance.m());
    for j in 0..instance.m() {
        let table = instance.loss(j)?.as_table()?;
        // Dense per-hypothesis columns, resolved once so the closures do
        // plain lookups: column[feature][slot][h].
        let mut columns = vec![[const { Vec::new() }; 2]; features];
        for (x, cell) in columns.iter_mut().enumerate() {
            for (slot, label) in [(0usize, -1i8), (1, 1)] {
                let z = Datapoint::discrete(x, label)?;
                let mut col = Vec::with_capacity(k);
                for h in 0..k {
                    col.push(table.value(class, h, &z)?);
                }
                cell[slot] = col;
            }
        }
        let value_cols = std::sync::Arc::new(columns);
        let grad_cols = value_cols.clone();
        losses.push(LossFunction::Smooth(SmoothLoss::new(
            move |w: &[f64], z: &Datapoint| {
                let col = relaxed_column(&value_cols, z);
                w.iter().zip(col).map(|(wi, li)| wi * li).sum()
            },
            move |_w: &[f64], z: &Datapoint| relaxed_column(&grad_cols, z).to_vec(),
            1.0,
        )?));
    }

    MDLInstance::new(
        instance.distributions().to_vec(),
        losses,
        HypothesisSpace::Convex(ConvexParamSpace::simplex(k)?),
    )
}

fn relaxed_column<'a>(columns: &'a [[Vec<f64>; 2]], z: &Datapoint) -> &'a [f64] {
    let Datapoint::Discrete { feature, label } = z else {
        panic!("relaxed loss evaluated on a non-discrete datapoint");
    };
    let cell = columns
        .get(*feature)
        .unwrap_or_else(|| panic!("feature {feature} outside the relaxed loss domain"));
    &cell[Datapoint::label_slot(*label)]
}

/// Derandomizes a hypothesis mixture into one deterministic labeling:
/// label +1 where the mixture puts strictly more than half its mass on +1,
/// label -1 otherwise (exact ties included). For classification losses the
/// result's worst-case risk is at most twice the mixture's.
pub fn majority_vote(
    weights: &SimplexWeights,
    class: &FiniteHypothesisClass,
) -> Result<Vec<i8>> {
    if weights.len() != class.size() {
        return Err(Error::invalid(format!(
            "{} weights for a class of {} hypotheses",
            weights.len(),
            class.size()
        )));
    }
    let mut labels = Vec::with_capacity(class.features());
    for x in 0..class.features() {
        let mass: f64 = (0..class.size())
            .filter(|&h| class.labels(h)[x] == 1)
            .map(|h| weights.get(h))
            .sum();
        labels.push(if mass > 0.5 { 1 } else { -1 });
    }
    Ok(labels)
}

/// Hypothesis families on the real line with known VC dimension, used to
/// build finite classes by projection onto a sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VcFamily {
    /// `x -> +1 iff x > t` for a threshold `t` (VC dimension 1).
    Thresholds,
    /// `x -> +1 iff a <= x <= b` for an interval `[a, b]` (VC dimension 2).
    Intervals,
}

impl VcFamily {
    pub fn vc_dimension(&self) -> usize {
        match self {
            VcFamily::Thresholds => 1,
            VcFamily::Intervals => 2,
        }
    }

    /// Labels `points` for one concrete member of the family.
    pub fn labels(&self, member: &FamilyMember, points: &[f64]) -> Vec<i8> {
        match (self, member) {
            (VcFamily::Thresholds, FamilyMember::Threshold(t)) => {
                points.iter().map(|&x| if x > *t { 1 } else { -1 }).collect()
            }
            (VcFamily::Intervals, FamilyMember::Interval(a, b)) => {
                points.iter().map(|&x| if *a <= x && x <= *b { 1 } else { -1 }).collect()
            }
            _ => panic!("family member does not belong to this family"),
        }
    }
}

/// A concrete hypothesis from a [`VcFamily`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyMember {
    Threshold(f64),
    Interval(f64, f64),
}

/// Projects a VC family onto a sample: one representative hypothesis per
/// distinct labeling the family realizes on `points`. Feature `i` of the
/// returned class is sample point `i`. Two family members collapse to the
/// same hypothesis exactly when they agree on every sample point.
pub fn project_class(family: VcFamily, points: &[f64]) -> Result<FiniteHypothesisClass> {
    if points.is_empty() {
        return Err(Error::invalid("projection needs at least one sample point"));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("sample points must be finite"));
    }
    let mut distinct: Vec<f64> = points.to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    distinct.dedup();

    let mut patterns: BTreeSet<Vec<i8>> = BTreeSet::new();
    match family {
        VcFamily::Thresholds => {
            // Every realizable pattern is "x > v" for some sample value v,
            // plus the all-positive one from a threshold below the sample.
            let below = distinct[0] - 1.0;
            patterns.insert(family.labels(&FamilyMember::Threshold(below), points));
            for &v in &distinct {
                patterns.insert(family.labels(&FamilyMember::Threshold(v), points));
            }
        }
        VcFamily::Intervals => {
            patterns.insert(vec![-1; points.len()]);
            for (i, &a) in distinct.iter().enumerate() {
                for &b in &distinct[i..] {
                    patterns.insert(family.labels(&FamilyMember::Interval(a, b), points));
                }
            }
        }
    }
    FiniteHypothesisClass::new(patterns.into_iter().collect())
}

/// Sample size sufficient for the projection of a VC-dimension-`d` family on
/// an i.i.d. sample to be an epsilon-net with probability 1 - delta:
/// `ceil((8d/eps) ln(8d/eps) + (4/eps) ln(2/delta))`.
pub fn haussler_net_size(d: usize, eps: f64, delta: f64) -> Result<u64> {
    if d == 0 {
        return Err(Error::invalid("VC dimension must be at least 1"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta must lie in (0, 1)"));
    }
    let a = 8.0 * d as f64 / eps;
    Ok((a * a.ln() + (4.0 / eps) * (2.0 / delta).ln()).ceil() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DataDistribution;
    use crate::loss::TableLoss;
    use crate::minimax::brute_force_opt;
    use crate::risk::{exact_risk, support_risk, worst_case_risk, worst_support_risk, Predictor};
    use crate::rng::substream;
    use proptest::prelude::*;
    use rand::Rng;

    fn two_point_dist(p_plus: f64, feature: usize) -> DataDistribution {
        DataDistribution::finite(vec![
            (Datapoint::discrete(feature, 1).unwrap(), p_plus),
            (Datapoint::discrete(feature, -1).unwrap(), 1.0 - p_plus),
        ])
        .unwrap()
    }

    fn random_instance(seed: u64, features: usize, dists: usize) -> MDLInstance {
        let mut rng = substream(seed, 0);
        let class = FiniteHypothesisClass::all_labelings(features).unwrap();
        let distributions = (0..dists)
            .map(|_| {
                let mut support = Vec::new();
                let mut mass = Vec::new();
                for x in 0..features {
                    for label in [-1i8, 1] {
                        support.push(Datapoint::discrete(x, label).unwrap());
                        mass.push(rng.gen_range(0.05..1.0));
                    }
                }
                let total: f64 = mass.iter().sum();
                DataDistribution::finite(
                    support.into_iter().zip(mass.into_iter().map(|m| m / total)).collect(),
                )
                .unwrap()
            })
            .collect();
        MDLInstance::new(
            distributions,
            vec![LossFunction::zero_one()],
            HypothesisSpace::Finite(class),
        )
        .unwrap()
    }

    #[test]
    fn point_mass_relaxation_equals_the_pure_loss() {
        let class = FiniteHypothesisClass::all_labelings(2).unwrap();
        let table = TableLoss::explicit(vec![
            vec![[0.1, 0.9], [0.3, 0.7]],
            vec![[0.2, 0.8], [0.4, 0.6]],
            vec![[0.5, 0.5], [0.6, 0.4]],
            vec![[0.0, 1.0], [1.0, 0.0]],
        ])
        .unwrap();
        let inst = MDLInstance::new(
            vec![two_point_dist(0.5, 0)],
            vec![LossFunction::Table(table.clone())],
            HypothesisSpace::Finite(class.clone()),
        )
        .unwrap();
        let relaxed = relax_collaborative(&inst).unwrap();
        for h in 0..class.size() {
            let mut w = vec![0.0; class.size()];
            w[h] = 1.0;
            for x in 0..2 {
                for label in [-1i8, 1] {
                    let z = Datapoint::discrete(x, label).unwrap();
                    let relaxed_val = relaxed.smooth_loss(0).unwrap().value(&w, &z);
                    let pure = table.value(&class, h, &z).unwrap();
                    assert_eq!(relaxed_val, pure, "h={h} x={x} label={label}");
                }
            }
        }
    }

    #[test]
    fn uniform_mixture_averages_the_losses() {
        let class = FiniteHypothesisClass::new(vec![vec![1], vec![-1]]).unwrap();
        let inst = MDLInstance::new(
            vec![two_point_dist(1.0, 0)],
            vec![LossFunction::zero_one()],
            HypothesisSpace::Finite(class),
        )
        .unwrap();
        let relaxed = relax_collaborative(&inst).unwrap();
        let z = Datapoint::discrete(0, 1).unwrap();
        assert_eq!(relaxed.smooth_loss(0).unwrap().value(&[0.5, 0.5], &z), 0.5);
    }

    #[test]
    fn relaxed_optimum_never_beats_itself_and_never_loses_to_pure_play() {
        let inst = {
            let mut rng = substream(61, 0);
            let mut rows = BTreeSet::new();
            while rows.len() < 6 {
                let row: Vec<i8> =
                    (0..4).map(|_| if rng.gen_range(0..2) == 1 { 1 } else { -1 }).collect();
                rows.insert(row);
            }
            let class = FiniteHypothesisClass::new(rows.into_iter().collect()).unwrap();
            let dists = (0..3)
                .map(|_| {
                    let mut support = Vec::new();
                    let mut mass = Vec::new();
                    for x in 0..4 {
                        for label in [-1i8, 1] {
                            support.push(Datapoint::discrete(x, label).unwrap());
                            mass.push(rng.gen_range(0.05..1.0));
                        }
                    }
                    let total: f64 = mass.iter().sum();
                    DataDistribution::finite(
                        support.into_iter().zip(mass.into_iter().map(|m| m / total)).collect(),
                    )
                    .unwrap()
                })
                .collect();
            MDLInstance::new(
                dists,
                vec![LossFunction::zero_one()],
                HypothesisSpace::Finite(class),
            )
            .unwrap()
        };
        let relaxed = relax_collaborative(&inst).unwrap();
        let report = brute_force_opt(&inst).unwrap();

        // The optimal mixture scores the same worst-case risk through the
        // relaxed losses as through the original randomized evaluation.
        let relaxed_worst = worst_support_risk(&relaxed, report.weights.as_slice()).unwrap();
        assert!((relaxed_worst - report.value).abs() <= 1e-9);

        // And relaxing can only help: the best pure hypothesis is a vertex.
        let k = inst.class().unwrap().size();
        let best_pure = (0..k)
            .map(|h| worst_case_risk(&inst, &Predictor::Pure(h)).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(report.value <= best_pure + 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn relaxed_risk_is_linear_in_the_weights(
            seed in 0u64..10_000,
            raw in proptest::collection::vec(0.01f64..1.0, 4),
        ) {
            let inst = random_instance(seed, 2, 2);
            let relaxed = relax_collaborative(&inst).unwrap();
            let w = SimplexWeights::normalized(raw).unwrap();
            for i in 0..2 {
                let mixed = support_risk(&relaxed, w.as_slice(), i, 0).unwrap();
                let mut linear = 0.0;
                for h in 0..4 {
                    linear += w.get(h) * exact_risk(&inst, &Predictor::Pure(h), i, 0).unwrap();
                }
                prop_assert!((mixed - linear).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn majority_follows_the_heavier_side() {
        let class = FiniteHypothesisClass::new(vec![vec![1], vec![-1]]).unwrap();
        let w = SimplexWeights::new(vec![0.6, 0.4]).unwrap();
        assert_eq!(majority_vote(&w, &class).unwrap(), vec![1]);
    }

    #[test]
    fn exact_tie_goes_to_the_negative_label() {
        let class = FiniteHypothesisClass::new(vec![vec![1], vec![-1]]).unwrap();
        let w = SimplexWeights::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(majority_vote(&w, &class).unwrap(), vec![-1]);
    }

    #[test]
    fn majority_rejects_mismatched_weights() {
        let class = FiniteHypothesisClass::all_labelings(2).unwrap();
        let w = SimplexWeights::uniform(3).unwrap();
        assert!(majority_vote(&w, &class).is_err());
    }

    #[test]
    fn majority_vote_risk_is_within_twice_the_mixture_risk() {
        for seed in 0..20 {
            let inst = random_instance(seed, 3, 2);
            let k = inst.class().unwrap().size();
            let mut rng = substream(seed, 1);
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
            let w = SimplexWeights::normalized(raw).unwrap();
            let maj = majority_vote(&w, inst.class().unwrap()).unwrap();
            let maj_inst = MDLInstance::new(
                inst.distributions().to_vec(),
                vec![LossFunction::zero_one()],
                HypothesisSpace::Finite(FiniteHypothesisClass::new(vec![maj]).unwrap()),
            )
            .unwrap();
            let maj_risk = worst_case_risk(&maj_inst, &Predictor::Pure(0)).unwrap();
            let mix_risk = worst_case_risk(&inst, &Predictor::Mixed(&w)).unwrap();
            assert!(
                maj_risk <= 2.0 * mix_risk + 1e-12,
                "seed {seed}: {maj_risk} vs 2 x {mix_risk}"
            );
        }
    }

    #[test]
    fn three_points_give_four_threshold_classes() {
        let class = project_class(VcFamily::Thresholds, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(class.size(), 4);
    }

    #[test]
    fn one_point_gives_two_classes_in_both_families() {
        assert_eq!(project_class(VcFamily::Thresholds, &[0.3]).unwrap().size(), 2);
        assert_eq!(project_class(VcFamily::Intervals, &[0.3]).unwrap().size(), 2);
    }

    fn sauer_bound(d: usize, n: usize) -> usize {
        // Sum of C(n, i) for i = 0..=d.
        let mut total = 0usize;
        let mut c = 1usize;
        for i in 0..=d {
            total += c;
            c = c * (n - i) / (i + 1);
        }
        total
    }

    #[test]
    fn interval_projection_respects_the_sauer_bound() {
        let mut rng = substream(17, 0);
        let points: Vec<f64> = (0..20).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let class = project_class(VcFamily::Intervals, &points).unwrap();
        assert!(class.size() <= sauer_bound(2, 20));
        // Distinct points realize every run of consecutive sorted points
        // plus the empty pattern, which meets the bound exactly.
        assert_eq!(class.size(), 211);
    }

    #[test]
    fn duplicated_points_shrink_the_projection() {
        let class = project_class(VcFamily::Thresholds, &[1.0, 1.0, 2.0]).unwrap();
        assert_eq!(class.size(), 3);
    }

    #[test]
    fn projection_rejects_empty_and_non_finite_samples() {
        assert!(project_class(VcFamily::Thresholds, &[]).is_err());
        assert!(project_class(VcFamily::Intervals, &[0.0, f64::NAN]).is_err());
    }

    #[test]
    fn every_realized_pattern_appears_exactly_once() {
        let mut rng = substream(23, 0);
        let points: Vec<f64> = (0..12).map(|_| rng.gen_range(-3.0..3.0)).collect();
        for family in [VcFamily::Thresholds, VcFamily::Intervals] {
            let class = project_class(family, &points).unwrap();
            let rows: BTreeSet<&Vec<i8>> = class.rows().iter().collect();
            assert_eq!(rows.len(), class.size(), "duplicate hypothesis in projection");
            for _ in 0..500 {
                let member = match family {
                    VcFamily::Thresholds => FamilyMember::Threshold(rng.gen_range(-4.0..4.0)),
                    VcFamily::Intervals => {
                        let a: f64 = rng.gen_range(-4.0..4.0);
                        let b: f64 = rng.gen_range(-4.0..4.0);
                        FamilyMember::Interval(a.min(b), a.max(b))
                    }
                };
                let pattern = family.labels(&member, &points);
                assert!(rows.contains(&pattern), "{member:?} realizes a missing pattern");
            }
        }
    }

    #[test]
    fn net_sizes_match_hand_computed_values() {
        assert_eq!(haussler_net_size(1, 0.1, 0.05).unwrap(), 499);
        assert_eq!(haussler_net_size(2, 0.1, 0.05).unwrap(), 960);
        assert_eq!(haussler_net_size(1, 0.5, 0.5).unwrap(), 56);
        assert_eq!(haussler_net_size(2, 0.05, 0.01).unwrap(), 2270);
    }

    #[test]
    fn net_size_rejects_bad_parameters() {
        assert!(haussler_net_size(0, 0.1, 0.1).is_err());
        assert!(haussler_net_size(1, 0.0, 0.1).is_err());
        assert!(haussler_net_size(1, 0.1, 1.0).is_err());
    }
}
