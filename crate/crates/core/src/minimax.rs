//! Exact minimax over finite instances.
//!
//! [`brute_force_opt`] computes `OPT = min over hypothesis mixtures of the
//! worst (distribution, loss) risk` by solving the equivalent linear program
//! with a dense simplex method under Bland's anticycling rule, which
//! terminates and leaves a residual duality gap at float roundoff (checked
//! against 1e-6 before returning). The solver is capped at
//! [`MAX_OPT_ENTRIES`] risk-matrix entries; it exists to certify small
//! instances, not to scale.

use crate::error::{Error, Result};
use crate::problem::MDLInstance;
use crate::risk::{exact_risk, worst_case_risk, Predictor};
use crate::simplex::SimplexWeights;

/// Cap on `|class| * n * m` for the exact solver.
pub const MAX_OPT_ENTRIES: usize = 10_000;

/// Residual duality gap accepted from the exact solver.
pub const DUALITY_GAP_TOLERANCE: f64 = 1e-6;

/// An exact saddle point of a finite instance.
#[derive(Clone, Debug)]
pub struct OptReport {
    /// The game value `OPT`.
    pub value: f64,
    /// Optimal mixture over hypotheses.
    pub weights: SimplexWeights,
    /// Optimal adversary mixture over (distribution, loss) pairs.
    pub adversary: SimplexWeights,
}

/// Risk matrix of an exact-evaluable instance: rows are hypotheses, columns
/// are flattened (distribution, loss) pairs.
pub fn risk_matrix(instance: &MDLInstance) -> Result<Vec<Vec<f64>>> {
    let class = instance.class()?;
    let mut matrix = Vec::with_capacity(class.size());
    for h in 0..class.size() {
        let mut row = Vec::with_capacity(instance.n() * instance.m());
        for i in 0..instance.n() {
            for j in 0..instance.m() {
                row.push(exact_risk(instance, &Predictor::Pure(h), i, j)?);
            }
        }
        matrix.push(row);
    }
    Ok(matrix)
}

/// Exact `OPT` and an optimal randomized hypothesis for a finite instance.
pub fn brute_force_opt(instance: &MDLInstance) -> Result<OptReport> {
    if !instance.exact_evaluable() {
        return Err(Error::UnsupportedExact(
            "brute_force_opt needs finite supports, table losses, and a finite class".into(),
        ));
    }
    let entries = instance.class()?.size() * instance.n() * instance.m();
    if entries > MAX_OPT_ENTRIES {
        return Err(Error::ResourceLimit(format!(
            "risk matrix has {entries} entries, above the exact-solver cap of {MAX_OPT_ENTRIES}"
        )));
    }
    let matrix = risk_matrix(instance)?;
    matrix_game_value(&matrix)
}

/// Worst-case risk of the predictor minus `OPT`. Within float error this is
/// nonnegative; values may dip to around -1e-9 on near-optimal predictors.
pub fn optimality_gap(instance: &MDLInstance, predictor: &Predictor) -> Result<f64> {
    let opt = brute_force_opt(instance)?;
    Ok(worst_case_risk(instance, predictor)? - opt.value)
}

/// Whether the predictor is `eps`-optimal, judged as gap <= eps + 1e-6 so a
/// solver meeting the target exactly is not rejected over float noise.
pub fn is_eps_optimal(instance: &MDLInstance, predictor: &Predictor, eps: f64) -> Result<bool> {
    Ok(optimality_gap(instance, predictor)? <= eps + 1e-6)
}

/// Value and optimal mixed strategies of the zero-sum game where the row
/// player minimizes and the column player maximizes `p' M q`.
pub fn matrix_game_value(matrix: &[Vec<f64>]) -> Result<OptReport> {
    let rows = matrix.len();
    if rows == 0 || matrix[0].is_empty() {
        return Err(Error::invalid("game matrix must be nonempty"));
    }
    let cols = matrix[0].len();
    let mut min_entry = f64::INFINITY;
    for row in matrix {
        if row.len() != cols {
            return Err(Error::invalid("game matrix rows must have equal length"));
        }
        for &v in row {
            if !v.is_finite() {
                return Err(Error::invalid("game matrix entries must be finite"));
            }
            min_entry = min_entry.min(v);
        }
    }
    // Shift entries to be >= 1 so the game value is strictly positive and the
    // classical normalization x = p / value is well defined.
    let shift = 1.0 - min_entry;

    // LP: maximize sum(x) subject to, for every column j,
    //   sum_i x_i (M[i][j] + shift) <= 1,  x >= 0.
    // At the optimum, value' = 1 / sum(x), p = x * value', and the duals on
    // the column constraints scale to the adversary's optimal mixture.
    let width = rows + cols + 1;
    let mut tab = vec![vec![0.0f64; width]; cols + 1];
    for j in 0..cols {
        for (i, row) in matrix.iter().enumerate() {
            tab[j][i] = row[j] + shift;
        }
        tab[j][rows + j] = 1.0;
        tab[j][width - 1] = 1.0;
    }
    for i in 0..rows {
        tab[cols][i] = -1.0;
    }
    let mut basis: Vec<usize> = (rows..rows + cols).collect();

    const PIVOT_TOL: f64 = 1e-12;
    loop {
        // Bland's rule: lowest-index column with a negative objective entry.
        let Some(entering) = (0..rows + cols).find(|&j| tab[cols][j] < -PIVOT_TOL) else {
            break;
        };
        let mut leaving: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for r in 0..cols {
            if tab[r][entering] > PIVOT_TOL {
                let ratio = tab[r][width - 1] / tab[r][entering];
                let better = ratio < best_ratio - PIVOT_TOL
                    || ((ratio - best_ratio).abs() <= PIVOT_TOL
                        && leaving.map_or(true, |l| basis[r] < basis[l]));
                if better {
                    best_ratio = ratio;
                    leaving = Some(r);
                }
            }
        }
        let Some(leaving) = leaving else {
            return Err(Error::ContractViolation(
                "minimax LP reported unbounded, which a shifted game matrix cannot produce".into(),
            ));
        };
        let pivot = tab[leaving][entering];
        for v in tab[leaving].iter_mut() {
            *v /= pivot;
        }
        for r in 0..=cols {
            if r != leaving {
                let factor = tab[r][entering];
                if factor != 0.0 {
                    for c in 0..width {
                        tab[r][c] -= factor * tab[leaving][c];
                    }
                }
            }
        }
        basis[leaving] = entering;
    }

    let objective = tab[cols][width - 1];
    if objective <= 0.0 {
        return Err(Error::ContractViolation("minimax LP closed with nonpositive objective".into()));
    }
    let shifted_value = 1.0 / objective;

    let mut x = vec![0.0f64; rows];
    for (r, &b) in basis.iter().enumerate() {
        if b < rows {
            x[b] = tab[r][width - 1].max(0.0);
        }
    }
    let weights = SimplexWeights::normalized(x)?;
    let duals: Vec<f64> = (0..cols).map(|j| tab[cols][rows + j].max(0.0)).collect();
    let adversary = SimplexWeights::normalized(duals)?;
    let value = shifted_value - shift;

    // Certify: the returned strategies must pin the value from both sides.
    let col_payoff = |j: usize| -> f64 {
        (0..rows).map(|i| weights.get(i) * matrix[i][j]).sum()
    };
    let primal_worst = (0..cols).map(col_payoff).fold(f64::NEG_INFINITY, f64::max);
    let row_payoff = |i: usize| -> f64 {
        (0..cols).map(|j| adversary.get(j) * matrix[i][j]).sum()
    };
    let dual_best = (0..rows).map(row_payoff).fold(f64::INFINITY, f64::min);
    if primal_worst - dual_best > DUALITY_GAP_TOLERANCE {
        return Err(Error::ContractViolation(format!(
            "minimax certificate failed: duality gap {} above {DUALITY_GAP_TOLERANCE}",
            primal_worst - dual_best
        )));
    }
    Ok(OptReport { value, weights, adversary })
}
