//! Collaborative learning across many data distributions with shared sample
//! budgets.
//!
//! The crate centers on [`MDLInstance`]: `n` distributions, `m` losses, and a
//! hypothesis space that is either a finite class or a convex parameter set.
//! Solvers drive no-regret dynamics between a learner and an auditor until
//! the averaged play is provably near the minimax optimum, spending samples
//! on demand instead of up front.

pub mod baseline;
pub mod data;
pub mod dynamics;
pub mod error;
pub mod gdro;
pub mod hypotheses;
pub mod instances;
pub mod learners;
pub mod loss;
pub mod minimax;
pub mod problem;
pub mod reductions;
pub mod risk;
pub mod rmdl;
pub mod rng;
pub mod simplex;
pub mod space;

pub use baseline::{batch_erm_baseline, BatchErmModel, BatchErmOutcome};
pub use data::{DataDistribution, Datapoint};
pub use dynamics::{
    auditor_payoff_estimate, equilibrium_gap, learner_gradient_estimate, mdl_solve,
    required_iterations, required_iterations_scaled, solve_game, AuditorEstimate, FirstOrderOracle,
    LearnerEstimate, RoundLog, SolveParams, SolveResult,
};
pub use error::{Error, Result};
pub use gdro::{
    empirical_gdro, empirical_gdro_scaled, empirical_instance, gdro_solve, gdro_solve_scaled,
    GdroSolution,
};
pub use hypotheses::FiniteHypothesisClass;
pub use instances::{
    logistic_loss, make_coin_instance, make_convex_gdro, make_lower_bound_family,
    make_random_agnostic, make_realizable, sample_lower_bound_variant, CoinHypothesis,
    ConvexFamily, ConvexGdroMeta, InstanceSpec, LowerBoundVariant,
};
pub use learners::{hedge_default_rate, omd_step, BanditLearner, Hedge, PartialFeedback, Partition};
pub use loss::{LossFunction, SmoothLoss, TableLoss};
pub use minimax::{brute_force_opt, matrix_game_value, optimality_gap, OptReport};
pub use problem::{HypothesisSpace, MDLInstance};
pub use reductions::{
    haussler_net_size, majority_vote, project_class, relax_collaborative, FamilyMember, VcFamily,
};
pub use risk::{exact_risk, monte_carlo_risk, support_risk, worst_case_risk, worst_support_risk, Predictor};
pub use rmdl::{rmdl_train, RmdlConfig, RmdlOutcome};
pub use simplex::SimplexWeights;
pub use space::{ConvexParamSpace, NormPair};
