//! Online learning algorithms and their bookkeeping.

mod bandit;
mod hedge;
mod omd;
mod regret;

pub use bandit::{BanditLearner, BanditStep, PartialFeedback, Partition};
pub use hedge::{hedge_default_rate, Hedge};
pub use omd::{omd_step, OmdLearner};
pub use regret::{regret, variational_error, RegretLedger, TranscriptRow};

use crate::error::Result;

/// A sequential full-information player: exposes its current action and
/// folds in one cost (or gradient) vector per round.
pub trait OnlineLearner {
    fn dim(&self) -> usize;
    fn action(&self) -> Vec<f64>;
    fn observe(&mut self, costs: &[f64]) -> Result<()>;
}

impl OnlineLearner for Hedge {
    fn dim(&self) -> usize {
        self.k()
    }

    fn action(&self) -> Vec<f64> {
        self.weights().into_vec()
    }

    fn observe(&mut self, costs: &[f64]) -> Result<()> {
        self.update(costs).map(drop)
    }
}

impl OnlineLearner for OmdLearner {
    fn dim(&self) -> usize {
        self.space().dim()
    }

    fn action(&self) -> Vec<f64> {
        self.theta().to_vec()
    }

    fn observe(&mut self, gradient: &[f64]) -> Result<()> {
        OmdLearner::observe(self, gradient)
    }
}
