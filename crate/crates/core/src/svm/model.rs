//! Trained classifiers: a binary model over its support set and the
//! one-vs-one ensemble, with the shared decision rule
//! `f(x) = sum_i alpha_i y_i (k(x_i, x) + 1)`.

use crate::io::{Dataset, SparseVector};
use crate::svm::KernelSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct SupportVector {
    pub alpha: f64,
    /// Internal binary label, +1 or -1.
    pub label: f64,
    pub features: SparseVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub kernel: KernelSpec,
    pub c: f64,
    /// Original class label mapped to the internal +1 side.
    pub positive_label: f64,
    /// Original class label mapped to the internal -1 side.
    pub negative_label: f64,
    pub support: Vec<SupportVector>,
    /// Training-row indices of the support vectors (parallel to `support`);
    /// informational only and not serialized.
    pub support_indices: Vec<usize>,
}

impl SvmModel {
    /// Decision value `f(x)`; positive means the positive class.
    pub fn decision_value(&self, x: &[(u32, f64)]) -> f64 {
        self.support
            .iter()
            .map(|sv| sv.alpha * sv.label * (self.kernel.eval(&sv.features, x) + 1.0))
            .sum()
    }

    /// Predicted original label and the decision value. A zero decision
    /// value resolves to the positive class.
    pub fn predict(&self, x: &[(u32, f64)]) -> (f64, f64) {
        let f = self.decision_value(x);
        let label = if f >= 0.0 {
            self.positive_label
        } else {
            self.negative_label
        };
        (label, f)
    }
}

/// One binary model per unordered class pair.
#[derive(Debug, Clone, PartialEq)]
pub struct OvoEnsemble {
    /// Class labels in order of first appearance in the training data.
    pub classes: Vec<f64>,
    /// Models ordered by class-index pair `(i, j)`, `i < j`, with class `i`
    /// on the positive side.
    pub models: Vec<SvmModel>,
}

impl OvoEnsemble {
    /// Majority vote over the pair models. Ties resolve to the smallest
    /// class index. Returns the winning label and its vote count.
    pub fn predict(&self, x: &[(u32, f64)]) -> (f64, f64) {
        let mut votes = vec![0u32; self.classes.len()];
        for model in &self.models {
            let (label, _) = model.predict(x);
            let class_idx = self
                .classes
                .iter()
                .position(|&c| c == label)
                .expect("pair labels come from the class list");
            votes[class_idx] += 1;
        }
        let mut winner = 0;
        for (idx, &count) in votes.iter().enumerate().skip(1) {
            if count > votes[winner] {
                winner = idx;
            }
        }
        (self.classes[winner], votes[winner] as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Binary(SvmModel),
    Ovo(OvoEnsemble),
}

impl TrainedModel {
    pub fn predict(&self, x: &[(u32, f64)]) -> (f64, f64) {
        match self {
            TrainedModel::Binary(model) => model.predict(x),
            TrainedModel::Ovo(ensemble) => ensemble.predict(x),
        }
    }

    /// Total number of stored support vectors.
    pub fn support_size(&self) -> usize {
        match self {
            TrainedModel::Binary(model) => model.support.len(),
            TrainedModel::Ovo(ensemble) => {
                ensemble.models.iter().map(|m| m.support.len()).sum()
            }
        }
    }

    /// Fraction of correctly classified examples in a labelled dataset.
    pub fn accuracy(&self, data: &Dataset) -> f64 {
        if data.is_empty() {
            return 0.0;
        }
        let correct = data
            .rows
            .iter()
            .zip(&data.labels)
            .filter(|(row, &label)| self.predict(row).0 == label)
            .count();
        correct as f64 / data.len() as f64
    }
}
