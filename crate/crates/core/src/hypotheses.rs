//! Finite hypothesis classes as explicit label tables.

use crate::error::{Error, Result};

/// A finite class of binary predictors over a finite feature domain.
/// `labels[h][x]` is the prediction of hypothesis `h` at feature `x`,
/// stored as +1 or -1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteHypothesisClass {
    labels: Vec<Vec<i8>>,
    features: usize,
}

impl FiniteHypothesisClass {
    pub fn new(labels: Vec<Vec<i8>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("hypothesis class must be nonempty"));
        }
        let features = labels[0].len();
        if features == 0 {
            return Err(Error::invalid("hypotheses need at least one feature"));
        }
        for (h, row) in labels.iter().enumerate() {
            if row.len() != features {
                return Err(Error::invalid(format!(
                    "hypothesis {h} labels {} features, expected {features}",
                    row.len()
                )));
            }
            for &l in row {
                if l != 1 && l != -1 {
                    return Err(Error::invalid(format!("label {l} in hypothesis {h} is not +1 or -1")));
                }
            }
        }
        Ok(FiniteHypothesisClass { labels, features })
    }

    /// Every labeling of `features` features: 2^features hypotheses in
    /// lexicographic order (bit 0 of the hypothesis index decides feature 0,
    /// a set bit meaning label +1).
    pub fn all_labelings(features: usize) -> Result<Self> {
        const MAX_FEATURES: usize = 16;
        if features == 0 {
            return Err(Error::invalid("all_labelings needs at least one feature"));
        }
        if features > MAX_FEATURES {
            return Err(Error::ResourceLimit(format!(
                "all_labelings caps at {MAX_FEATURES} features (2^{features} hypotheses requested)"
            )));
        }
        let count = 1usize << features;
        let labels = (0..count)
            .map(|h| (0..features).map(|x| if (h >> x) & 1 == 1 { 1 } else { -1 }).collect())
            .collect();
        FiniteHypothesisClass::new(labels)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn features(&self) -> usize {
        self.features
    }

    pub fn label(&self, h_idx: usize, feature: usize) -> Result<i8> {
        let row = self
            .labels
            .get(h_idx)
            .ok_or_else(|| Error::invalid(format!("hypothesis index {h_idx} out of range")))?;
        row.get(feature)
            .copied()
            .ok_or_else(|| Error::invalid(format!("feature {feature} out of range")))
    }

    pub fn labels(&self, h_idx: usize) -> &[i8] {
        &self.labels[h_idx]
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.labels
    }
}
