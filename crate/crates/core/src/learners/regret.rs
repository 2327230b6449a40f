//! Regret and variational-error accounting on simplex action sets.

use std::io::Write;

use crate::error::{Error, Result};

/// Per-round transcript entry, enough to recompute regret offline.
#[derive(Clone, Debug, PartialEq)]
pub struct TranscriptRow {
    pub round: u64,
    pub action: Vec<f64>,
    pub observed_set: Vec<usize>,
    pub estimated_costs: Vec<f64>,
}

/// Running regret state: cumulative cost per action, incurred cost, rounds.
/// With recording on, the full transcript is kept and [`RegretLedger::regret`]
/// stays recomputable from it.
#[derive(Clone, Debug)]
pub struct RegretLedger {
    cumulative_costs: Vec<f64>,
    incurred: f64,
    rounds: u64,
    transcript: Option<Vec<TranscriptRow>>,
}

impl RegretLedger {
    pub fn new(k: usize, record: bool) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("ledger needs at least one action"));
        }
        Ok(Self {
            cumulative_costs: vec![0.0; k],
            incurred: 0.0,
            rounds: 0,
            transcript: record.then(Vec::new),
        })
    }

    pub fn k(&self) -> usize {
        self.cumulative_costs.len()
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn incurred(&self) -> f64 {
        self.incurred
    }

    pub fn cumulative_costs(&self) -> &[f64] {
        &self.cumulative_costs
    }

    /// Records a full-information round.
    pub fn push(&mut self, action: &[f64], costs: &[f64]) -> Result<()> {
        let full: Vec<usize> = (0..self.k()).collect();
        self.push_observed(action, &full, costs)
    }

    /// Records a round where only `observed_set` carries (estimated) costs;
    /// unobserved entries count as zero.
    pub fn push_observed(
        &mut self,
        action: &[f64],
        observed_set: &[usize],
        costs: &[f64],
    ) -> Result<()> {
        if action.len() != self.k() {
            return Err(Error::invalid("action length does not match ledger"));
        }
        if observed_set.len() != costs.len() {
            return Err(Error::invalid("observed set and costs differ in length"));
        }
        for (&i, &c) in observed_set.iter().zip(costs) {
            if i >= self.k() {
                return Err(Error::invalid(format!("observed index {i} out of range")));
            }
            if !c.is_finite() {
                return Err(Error::invalid("ledger cost must be finite"));
            }
            self.cumulative_costs[i] += c;
            self.incurred += action[i] * c;
        }
        self.rounds += 1;
        if let Some(rows) = &mut self.transcript {
            rows.push(TranscriptRow {
                round: self.rounds,
                action: action.to_vec(),
                observed_set: observed_set.to_vec(),
                estimated_costs: costs.to_vec(),
            });
        }
        Ok(())
    }

    /// Incurred cost minus the best fixed action's cumulative cost.
    pub fn regret(&self) -> f64 {
        self.incurred - self.cumulative_costs.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Index of the best fixed action, lowest index on ties.
    pub fn best_fixed_action(&self) -> usize {
        let mut best = 0;
        for i in 1..self.k() {
            if self.cumulative_costs[i] < self.cumulative_costs[best] {
                best = i;
            }
        }
        best
    }

    pub fn transcript(&self) -> Option<&[TranscriptRow]> {
        self.transcript.as_deref()
    }

    /// Writes the transcript as CSV: round, action weights, the observed set
    /// (semicolon-joined), estimated costs per action (zeros where
    /// unobserved).
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let rows = self
            .transcript
            .as_ref()
            .ok_or_else(|| Error::invalid("ledger was created without transcript recording"))?;
        let k = self.k();
        write!(out, "round")?;
        for i in 0..k {
            write!(out, ",action_{i}")?;
        }
        write!(out, ",observed_set")?;
        for i in 0..k {
            write!(out, ",estimate_{i}")?;
        }
        writeln!(out)?;
        for row in rows {
            write!(out, "{}", row.round)?;
            for a in &row.action {
                write!(out, ",{a}")?;
            }
            let joined: Vec<String> = row.observed_set.iter().map(|i| i.to_string()).collect();
            write!(out, ",{}", joined.join(";"))?;
            let mut dense = vec![0.0; k];
            for (&i, &c) in row.observed_set.iter().zip(&row.estimated_costs) {
                dense[i] = c;
            }
            for c in &dense {
                write!(out, ",{c}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

fn replay(actions: &[Vec<f64>], costs: &[Vec<f64>]) -> Result<f64> {
    if actions.len() != costs.len() {
        return Err(Error::invalid("actions and costs differ in length"));
    }
    let Some(first) = actions.first() else {
        return Ok(0.0);
    };
    let mut ledger = RegretLedger::new(first.len(), false)?;
    for (a, c) in actions.iter().zip(costs) {
        ledger.push(a, c)?;
    }
    Ok(ledger.regret())
}

/// Total regret of a played sequence against linear cost vectors; the best
/// fixed comparator on the simplex sits at a vertex.
pub fn regret(actions: &[Vec<f64>], costs: &[Vec<f64>]) -> Result<f64> {
    replay(actions, costs)
}

/// Variational error: regret measured against the gradients of (possibly
/// nonlinear) convex costs at the played actions. Upper-bounds the true
/// regret of the same sequence; coincides with it when costs are linear.
pub fn variational_error(actions: &[Vec<f64>], gradients: &[Vec<f64>]) -> Result<f64> {
    replay(actions, gradients)
}
