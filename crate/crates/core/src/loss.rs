//! Loss functions.
//!
//! Two kinds are supported. Table losses map a (hypothesis index, datapoint)
//! pair to a value in [0, 1] and admit exact risk computation on finite
//! supports. Smooth losses evaluate a parameter vector on a datapoint and
//! expose a gradient with a declared norm bound; they drive the convex
//! (group-DRO style) solvers.

use std::fmt;
use std::sync::Arc;

use crate::data::Datapoint;
use crate::error::{Error, Result};
use crate::hypotheses::FiniteHypothesisClass;

/// Loss values addressed by hypothesis index and discrete datapoint.
#[derive(Clone, Debug)]
pub enum TableLoss {
    /// Classification error 1{h(x) != y} against the instance's hypothesis class.
    ZeroOne,
    /// Dense table `values[h][feature][slot]` with slot 0 for label -1 and
    /// slot 1 for label +1. All entries must lie in [0, 1].
    Explicit { values: Vec<Vec<[f64; 2]>> },
}

impl TableLoss {
    pub fn explicit(values: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("explicit loss table must cover at least one hypothesis"));
        }
        let features = values[0].len();
        for row in &values {
            if row.len() != features {
                return Err(Error::invalid("explicit loss table rows must have equal feature counts"));
            }
            for cell in row {
                for &v in cell {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::invalid(format!("table loss value {v} outside [0, 1]")));
                    }
                }
            }
        }
        Ok(TableLoss::Explicit { values })
    }

    /// Loss of hypothesis `h_idx` on `z`, resolved against `class` for the
    /// zero-one case.
    pub fn value(&self, class: &FiniteHypothesisClass, h_idx: usize, z: &Datapoint) -> Result<f64> {
        let (feature, label) = match z {
            Datapoint::Discrete { feature, label } => (*feature, *label),
            Datapoint::Vector(_) => {
                return Err(Error::UnsupportedExact(
                    "table losses are defined on discrete datapoints only".into(),
                ))
            }
        };
        match self {
            TableLoss::ZeroOne => {
                let pred = class.label(h_idx, feature)?;
                Ok(if pred == label { 0.0 } else { 1.0 })
            }
            TableLoss::Explicit { values } => {
                let row = values
                    .get(h_idx)
                    .ok_or_else(|| Error::invalid(format!("hypothesis index {h_idx} outside loss table")))?;
                let cell = row
                    .get(feature)
                    .ok_or_else(|| Error::invalid(format!("feature {feature} outside loss table")))?;
                Ok(cell[Datapoint::label_slot(label)])
            }
        }
    }
}

type ValueFn = dyn Fn(&[f64], &Datapoint) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64], &Datapoint) -> Vec<f64> + Send + Sync;

/// A smooth loss on a parameter space: value, gradient, and a bound on the
/// gradient norm that the dynamics enforce at runtime.
#[derive(Clone)]
pub struct SmoothLoss {
    value: Arc<ValueFn>,
    gradient: Arc<GradFn>,
    norm_bound: f64,
}

impl SmoothLoss {
    pub fn new(
        value: impl Fn(&[f64], &Datapoint) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64], &Datapoint) -> Vec<f64> + Send + Sync + 'static,
        norm_bound: f64,
    ) -> Result<Self> {
        if !norm_bound.is_finite() || norm_bound <= 0.0 {
            return Err(Error::invalid(format!("gradient norm bound must be positive, got {norm_bound}")));
        }
        Ok(SmoothLoss { value: Arc::new(value), gradient: Arc::new(gradient), norm_bound })
    }

    pub fn value(&self, theta: &[f64], z: &Datapoint) -> f64 {
        (self.value)(theta, z)
    }

    pub fn gradient(&self, theta: &[f64], z: &Datapoint) -> Vec<f64> {
        (self.gradient)(theta, z)
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }
}

impl fmt::Debug for SmoothLoss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothLoss").field("norm_bound", &self.norm_bound).finish()
    }
}

#[derive(Clone, Debug)]
pub enum LossFunction {
    Table(TableLoss),
    Smooth(SmoothLoss),
}

impl LossFunction {
    pub fn zero_one() -> Self {
        LossFunction::Table(TableLoss::ZeroOne)
    }

    pub fn as_table(&self) -> Result<&TableLoss> {
        match self {
            LossFunction::Table(t) => Ok(t),
            LossFunction::Smooth(_) => Err(Error::UnsupportedExact(
                "operation needs a table loss, got a smooth loss".into(),
            )),
        }
    }

    pub fn as_smooth(&self) -> Result<&SmoothLoss> {
        match self {
            LossFunction::Smooth(s) => Ok(s),
            LossFunction::Table(_) => {
                Err(Error::invalid("operation needs a smooth loss, got a table loss"))
            }
        }
    }

    pub fn is_table(&self) -> bool {
        matches!(self, LossFunction::Table(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_one_matches_labels() {
        let class = FiniteHypothesisClass::new(vec![vec![1, -1], vec![-1, -1]]).unwrap();
        let loss = TableLoss::ZeroOne;
        let z = Datapoint::discrete(0, 1).unwrap();
        assert_eq!(loss.value(&class, 0, &z).unwrap(), 0.0);
        assert_eq!(loss.value(&class, 1, &z).unwrap(), 1.0);
    }

    #[test]
    fn explicit_table_validates_range() {
        assert!(TableLoss::explicit(vec![vec![[0.0, 1.5]]]).is_err());
        assert!(TableLoss::explicit(vec![vec![[0.2, 0.8]], vec![[0.0, 1.0]]]).is_ok());
    }

    #[test]
    fn explicit_table_lookup_uses_label_slot() {
        let loss = TableLoss::explicit(vec![vec![[0.25, 0.75]]]).unwrap();
        let class = FiniteHypothesisClass::new(vec![vec![1]]).unwrap();
        let minus = Datapoint::discrete(0, -1).unwrap();
        let plus = Datapoint::discrete(0, 1).unwrap();
        assert_eq!(loss.value(&class, 0, &minus).unwrap(), 0.25);
        assert_eq!(loss.value(&class, 0, &plus).unwrap(), 0.75);
    }

    #[test]
    fn table_loss_rejects_vector_points() {
        let loss = TableLoss::ZeroOne;
        let class = FiniteHypothesisClass::new(vec![vec![1]]).unwrap();
        let z = Datapoint::Vector(vec![0.5]);
        assert!(matches!(loss.value(&class, 0, &z), Err(Error::UnsupportedExact(_))));
    }

    #[test]
    fn smooth_loss_evaluates() {
        let loss = SmoothLoss::new(
            |theta, _| theta.iter().sum::<f64>(),
            |theta, _| vec![1.0; theta.len()],
            2.0,
        )
        .unwrap();
        let z = Datapoint::Vector(vec![0.0]);
        assert_eq!(loss.value(&[0.25, 0.5], &z), 0.75);
        assert_eq!(loss.gradient(&[0.25, 0.5], &z), vec![1.0, 1.0]);
    }
}
