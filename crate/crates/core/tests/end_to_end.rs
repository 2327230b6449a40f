//! Cross-module flows through the public API only: text formats feeding the
//! solver, the solver chasing the oracle, and the finite-to-convex
//! relaxation solving the same problem.

use mdlearn::problem::{parse_instance, write_instance};
use mdlearn::{
    brute_force_opt, make_random_agnostic, mdl_solve, relax_collaborative, worst_case_risk,
    worst_support_risk, InstanceSpec, Predictor, SimplexWeights, SolveParams,
};

#[test]
fn solving_a_parsed_instance_matches_the_original() {
    let mut original = make_random_agnostic(8, 4, 5, 21).unwrap();
    let text = write_instance(&original).unwrap();
    let mut reparsed = parse_instance(&text).unwrap();

    let a = mdl_solve(&mut original, 2000, 9, &SolveParams::default()).unwrap();
    let b = mdl_solve(&mut reparsed, 2000, 9, &SolveParams::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(original.draws_per_distribution(), reparsed.draws_per_distribution());
}

#[test]
fn spec_text_round_trip_rebuilds_the_same_instance() {
    let spec = InstanceSpec::RandomAgnostic { class_size: 6, n: 3, support_size: 4, seed: 17 };
    let reparsed = InstanceSpec::parse(&spec.to_text()).unwrap();
    assert_eq!(spec, reparsed);
    assert_eq!(
        write_instance(&spec.build().unwrap()).unwrap(),
        write_instance(&reparsed.build().unwrap()).unwrap()
    );
}

#[test]
fn averaged_play_approaches_the_oracle_value() {
    let mut instance = make_random_agnostic(10, 4, 5, 7).unwrap();
    let opt = brute_force_opt(&instance).unwrap().value;
    let result = mdl_solve(&mut instance, 40_000, 3, &SolveParams::default()).unwrap();
    let mixture = SimplexWeights::normalized(result.avg_min_action).unwrap();
    let worst = worst_case_risk(&instance, &Predictor::Mixed(&mixture)).unwrap();
    assert!(worst - opt <= 0.1, "gap {} after 40k rounds", worst - opt);
}

#[test]
fn relaxed_instance_reaches_the_finite_optimum() {
    let finite = make_random_agnostic(6, 3, 4, 13).unwrap();
    let opt = brute_force_opt(&finite).unwrap().value;
    let mut relaxed = relax_collaborative(&finite).unwrap();
    let result = mdl_solve(&mut relaxed, 40_000, 5, &SolveParams::default()).unwrap();
    // Mixtures over the class and points of the relaxed simplex share the
    // same risk functional, so the optima coincide.
    let worst = worst_support_risk(&relaxed, &result.avg_min_action).unwrap();
    assert!(worst - opt <= 0.1, "gap {} through the relaxation", worst - opt);
}
