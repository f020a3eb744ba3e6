//! Per-column error classifiers: a bagged tree committee with probability,
//! certainty and disagreement outputs, cross-validated grid search, and
//! surrogate-tree explanations.

pub mod committee;
pub mod cv;
pub mod explain;
pub mod tree;

use serde::{Deserialize, Serialize};

pub use committee::{certainty, default_grid, vote_entropy, Committee, Hyperparams};
pub use cv::{cross_validate, grid_search, CvReport};
pub use explain::{explain, train_surrogate, Explanation};
pub use tree::{DecisionTree, TreeNode};

/// The latest trained model of one column and its outputs over every row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnModel {
    pub column: usize,
    pub committee: Committee,
    pub hyperparams: Hyperparams,
    pub cv: CvReport,
    #[serde(with = "crate::serde_f64::vec")]
    pub probabilities: Vec<f64>,
    #[serde(with = "crate::serde_f64::vec")]
    pub disagreement: Vec<f64>,
    pub predictions: Vec<bool>,
    pub previous_predictions: Option<Vec<bool>>,
}

impl ColumnModel {
    pub fn new(
        column: usize,
        committee: Committee,
        hyperparams: Hyperparams,
        cv: CvReport,
        scores: Vec<(f64, f64)>,
        previous_predictions: Option<Vec<bool>>,
    ) -> Self {
        let (probabilities, disagreement): (Vec<f64>, Vec<f64>) = scores.into_iter().unzip();
        let predictions = probabilities.iter().map(|&p| p >= 0.5).collect();
        Self {
            column,
            committee,
            hyperparams,
            cv,
            probabilities,
            disagreement,
            predictions,
            previous_predictions,
        }
    }

    pub fn certainties(&self) -> Vec<f64> {
        certainty(&self.probabilities)
    }

    /// Fraction of rows whose prediction differs from the previous model's.
    /// A first model counts as a full change.
    pub fn prediction_change(&self) -> f64 {
        match &self.previous_predictions {
            None => 1.0,
            Some(prev) => {
                let changed = prev.iter().zip(&self.predictions).filter(|(a, b)| a != b).count();
                changed as f64 / self.predictions.len().max(1) as f64
            }
        }
    }
}
