//! Decision-path explanations from a shallow surrogate tree.

use serde::{Deserialize, Serialize};

use super::committee::class_weights;
use super::tree::{DecisionTree, TreeParams};
use crate::dense::Matrix;
use crate::featurizer::FeatureRegistry;
use crate::labels::LabelValue;

pub const SURROGATE_DEPTH: usize = 4;

/// Single tree on all features, depth at most [`SURROGATE_DEPTH`].
pub fn train_surrogate(x: &Matrix, y: &[bool]) -> DecisionTree {
    let idx: Vec<usize> = (0..y.len()).collect();
    let params = TreeParams {
        max_depth: SURROGATE_DEPTH,
        min_leaf: 1,
        max_features: None,
    };
    let mut rng = crate::seed::rng(0, &[crate::seed::SURROGATE]);
    DecisionTree::fit(x, y, &idx, class_weights(y), params, &mut rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationStep {
    pub feature: usize,
    pub name: String,
    /// `"<="` or `">"`.
    pub comparison: String,
    pub threshold: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub steps: Vec<ExplanationStep>,
    pub erroneous_fraction: f64,
    pub correct_fraction: f64,
    pub verdict: LabelValue,
}

impl Explanation {
    /// `IF a > 0.8 AND b <= 2 THEN erroneous`
    pub fn render(&self) -> String {
        let verdict = match self.verdict {
            LabelValue::Erroneous => "erroneous",
            LabelValue::Correct => "correct",
        };
        if self.steps.is_empty() {
            return verdict.to_string();
        }
        let conds: Vec<String> = self
            .steps
            .iter()
            .map(|s| format!("{} {} {}", s.name, s.comparison, short(s.threshold)))
            .collect();
        format!("IF {} THEN {verdict}", conds.join(" AND "))
    }
}

/// Four significant digits, without trailing zeros.
fn short(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let decimals = (3 - x.abs().log10().floor() as i32).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn explain(tree: &DecisionTree, row: &[f64], registry: &FeatureRegistry) -> Explanation {
    let (path, (e, c)) = tree.path(row);
    let steps = path
        .into_iter()
        .map(|s| ExplanationStep {
            feature: s.feature,
            name: registry.name(s.feature).to_string(),
            comparison: if s.went_left { "<=" } else { ">" }.to_string(),
            threshold: s.threshold,
            value: row[s.feature],
        })
        .collect();
    let total = e + c;
    let (ef, cf) = if total > 0.0 { (e / total, c / total) } else { (0.0, 0.0) };
    Explanation {
        steps,
        erroneous_fraction: ef,
        correct_fraction: cf,
        verdict: LabelValue::from_bool(super::tree::TreeNode::leaf_probability(e, c) >= 0.5),
    }
}
