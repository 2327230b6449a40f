//! Partial-feedback exponential weights: Exp3 and its partition
//! generalization, where one cell of meta-actions is observed per round.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::learners::hedge::Hedge;
use crate::simplex::SimplexWeights;

/// Disjoint index sets covering `0..k`. The learner announces one cell per
/// round and observes exactly the costs inside it.
#[derive(Clone, Debug)]
pub struct Partition {
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
}

impl Partition {
    pub fn new(cells: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("partition needs k >= 1"));
        }
        let mut cell_of = vec![usize::MAX; k];
        for (c, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::invalid("partition cells must be nonempty"));
            }
            for &i in cell {
                if i >= k {
                    return Err(Error::invalid(format!("partition index {i} out of range for k={k}")));
                }
                if cell_of[i] != usize::MAX {
                    return Err(Error::invalid(format!("partition index {i} appears in two cells")));
                }
                cell_of[i] = c;
            }
        }
        if cell_of.iter().any(|&c| c == usize::MAX) {
            return Err(Error::invalid("partition cells must cover every index"));
        }
        let mut cells = cells;
        for cell in &mut cells {
            cell.sort_unstable();
        }
        Ok(Self { cells, cell_of })
    }

    /// One cell per action index.
    pub fn singletons(k: usize) -> Result<Self> {
        Self::new((0..k).map(|i| vec![i]).collect(), k)
    }

    /// Cells grouping a flattened `n * m` pair index by its first coordinate:
    /// cell `i` holds `{i*m, .., i*m + m-1}`.
    pub fn grouped(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::invalid("grouped partition needs n, m >= 1"));
        }
        Self::new((0..n).map(|i| (i * m..(i + 1) * m).collect()).collect(), n * m)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn k(&self) -> usize {
        self.cell_of.len()
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c]
    }

    pub fn cell_of(&self, index: usize) -> usize {
        self.cell_of[index]
    }
}

/// Costs observed for one announced cell.
#[derive(Clone, Debug)]
pub struct PartialFeedback {
    /// Indices whose costs were observed; must equal the announced cell.
    pub observed_set: Vec<usize>,
    /// Cost in [0, 1] for each index in `observed_set`, same order.
    pub observed_costs: Vec<f64>,
}

/// One round's output: the mixture played and the cell to evaluate.
#[derive(Clone, Debug)]
pub struct BanditStep {
    pub action: SimplexWeights,
    pub cell: usize,
    pub observe: Vec<usize>,
}

/// Exponential weights driven by importance-weighted partial feedback.
///
/// With singleton cells this is Exp3 with implicit exploration `lambda`;
/// a coarser partition observes whole cells at once. Sampling uses the
/// state's own seeded stream so a run is a pure function of its seed.
#[derive(Clone, Debug)]
pub struct BanditLearner {
    hedge: Hedge,
    partition: Partition,
    lambda: f64,
    rng: ChaCha8Rng,
    pending: Option<usize>,
}

impl BanditLearner {
    pub fn elp(partition: Partition, rate: f64, lambda: f64, rng: ChaCha8Rng) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::invalid("exploration lambda must be finite and >= 0"));
        }
        Ok(Self { hedge: Hedge::new(partition.k(), rate)?, partition, lambda, rng, pending: None })
    }

    pub fn exp3(k: usize, rate: f64, lambda: f64, rng: ChaCha8Rng) -> Result<Self> {
        Self::elp(Partition::singletons(k)?, rate, lambda, rng)
    }

    /// Exploration rate `sqrt(ln(k) / (|P| * T))`; with singleton cells this
    /// is the usual `sqrt(ln(k) / (k * T))`.
    pub fn default_lambda(k: usize, cells: usize, t: u64) -> Result<f64> {
        if k < 2 || cells == 0 || t == 0 {
            return Err(Error::invalid("default lambda needs k >= 2, cells >= 1, T >= 1"));
        }
        Ok(((k as f64).ln() / (cells as f64 * t as f64)).sqrt())
    }

    pub fn k(&self) -> usize {
        self.hedge.k()
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn weights(&self) -> SimplexWeights {
        self.hedge.weights()
    }

    /// Runs one round: folds in feedback for the previously announced cell,
    /// then samples and announces the next one. The first round must be
    /// called without feedback; every later round must supply it.
    pub fn step(&mut self, feedback: Option<&PartialFeedback>) -> Result<BanditStep> {
        match (self.pending.take(), feedback) {
            (None, None) => {}
            (Some(cell), Some(fb)) => self.absorb(cell, fb)?,
            (Some(cell), None) => {
                return Err(Error::ProtocolViolation(format!(
                    "cell {cell} was announced but no feedback came back"
                )));
            }
            (None, Some(_)) => {
                return Err(Error::ProtocolViolation(
                    "feedback supplied but no cell was announced".into(),
                ));
            }
        }
        let action = self.hedge.weights();
        let index = action.sample_index(&mut self.rng);
        let cell = self.partition.cell_of(index);
        self.pending = Some(cell);
        Ok(BanditStep { action, cell, observe: self.partition.cell(cell).to_vec() })
    }

    fn absorb(&mut self, cell: usize, fb: &PartialFeedback) -> Result<()> {
        let members = self.partition.cell(cell);
        let mut sorted = fb.observed_set.clone();
        sorted.sort_unstable();
        if sorted != members {
            return Err(Error::ProtocolViolation(format!(
                "feedback covers {sorted:?} but cell {cell} is {members:?}"
            )));
        }
        if fb.observed_costs.len() != fb.observed_set.len() {
            return Err(Error::ProtocolViolation("feedback costs and indices differ in length".into()));
        }
        for &c in &fb.observed_costs {
            if !c.is_finite() || !(0.0..=1.0).contains(&c) {
                return Err(Error::invalid(format!("observed cost {c} outside [0, 1]")));
            }
        }
        let action = self.hedge.weights();
        let estimate = importance_weighted_estimate(
            &action,
            &fb.observed_set,
            &fb.observed_costs,
            self.lambda,
        );
        self.hedge.update_unchecked(&estimate)?;
        Ok(())
    }
}

/// Cell-importance-weighted cost estimate: observed entries are divided by
/// the action's mass on the observed cell plus `lambda`, everything else is
/// zero. At `lambda = 0` the estimator is exactly unbiased under cell
/// sampling proportional to mass.
fn importance_weighted_estimate(
    action: &SimplexWeights,
    observed_set: &[usize],
    observed_costs: &[f64],
    lambda: f64,
) -> Vec<f64> {
    let mass = action.mass(observed_set);
    let mut estimate = vec![0.0; action.as_ref().len()];
    for (&i, &c) in observed_set.iter().zip(observed_costs) {
        estimate[i] = c / (mass + lambda);
    }
    estimate
}
