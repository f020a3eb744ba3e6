//! A bagged committee of decision trees.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, TreeParams};
use crate::dense::Matrix;
use crate::error::{Error, Result};
use crate::seed;

/// Probability a single-class column's constant model assigns to the class
/// it has seen.
pub const CONSTANT_CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hyperparams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

/// The default search grid: depth {4, 8, 16} x min leaf {1, 5}.
pub fn default_grid() -> Vec<Hyperparams> {
    let mut g = Vec::new();
    for max_depth in [4, 8, 16] {
        for min_leaf in [1, 5] {
            g.push(Hyperparams { max_depth, min_leaf });
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Committee {
    Trees {
        trees: Vec<DecisionTree>,
        hyperparams: Hyperparams,
        /// `[erroneous, correct]`
        class_weight: [f64; 2],
        seed: u64,
        n_features: usize,
    },
    /// Fallback when the labels contain a single class.
    Constant { p_error: f64, n_features: usize },
}

/// Inverse-frequency class weights `[erroneous, correct]`, scaled so the
/// total weight equals the sample count.
pub fn class_weights(y: &[bool]) -> [f64; 2] {
    let n = y.len() as f64;
    let ne = y.iter().filter(|&&b| b).count() as f64;
    let nc = n - ne;
    let w = |k: f64| if k > 0.0 { n / (2.0 * k) } else { 0.0 };
    [w(ne), w(nc)]
}

pub fn is_single_class(y: &[bool]) -> bool {
    y.iter().all(|&b| b) || y.iter().all(|&b| !b)
}

impl Committee {
    /// Trains `n_trees` trees on bootstrap samples with `ceil(sqrt(F))`
    /// features examined per split. Labels with a single class produce a
    /// constant predictor instead.
    pub fn train(x: &Matrix, y: &[bool], hyperparams: Hyperparams, n_trees: usize, seed: u64) -> Committee {
        assert!(!y.is_empty(), "training needs at least one labeled example");
        assert!(n_trees >= 1, "a committee needs at least one tree");
        let f = x.cols();
        if is_single_class(y) {
            let p_error = if y[0] { CONSTANT_CONFIDENCE } else { 1.0 - CONSTANT_CONFIDENCE };
            return Committee::Constant { p_error, n_features: f };
        }
        let class_weight = class_weights(y);
        let params = TreeParams {
            max_depth: hyperparams.max_depth,
            min_leaf: hyperparams.min_leaf,
            max_features: Some(((f as f64).sqrt().ceil() as usize).max(1)),
        };
        let n = y.len();
        let trees = (0..n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = seed::rng(seed, &[seed::TRAIN, t as u64]);
                let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                DecisionTree::fit(x, y, &idx, class_weight, params, &mut rng)
            })
            .collect();
        Committee::Trees {
            trees,
            hyperparams,
            class_weight,
            seed,
            n_features: f,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Committee::Trees { n_features, .. } | Committee::Constant { n_features, .. } => *n_features,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Committee::Constant { .. })
    }

    pub fn n_trees(&self) -> usize {
        match self {
            Committee::Trees { trees, .. } => trees.len(),
            Committee::Constant { .. } => 1,
        }
    }

    fn check(&self, x: &Matrix) -> Result<()> {
        if x.cols() != self.n_features() {
            return Err(Error::FeatureLengthMismatch {
                expected: self.n_features(),
                found: x.cols(),
            });
        }
        Ok(())
    }

    /// Per-tree leaf probabilities for one row.
    fn member_probs(&self, row: &[f64]) -> Vec<f64> {
        match self {
            Committee::Trees { trees, .. } => trees.iter().map(|t| t.predict_row(row)).collect(),
            Committee::Constant { p_error, .. } => vec![*p_error],
        }
    }

    /// Mean member probability of the erroneous class per row.
    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>> {
        Ok(self.score(x)?.into_iter().map(|(p, _)| p).collect())
    }

    /// Vote entropy per row.
    pub fn disagreement(&self, x: &Matrix) -> Result<Vec<f64>> {
        Ok(self.score(x)?.into_iter().map(|(_, d)| d).collect())
    }

    /// Probability and disagreement per row in one pass.
    pub fn score(&self, x: &Matrix) -> Result<Vec<(f64, f64)>> {
        self.check(x)?;
        Ok((0..x.rows())
            .into_par_iter()
            .map(|i| {
                let probs = self.member_probs(x.row(i));
                let t = probs.len() as f64;
                let p = probs.iter().sum::<f64>() / t;
                let votes = probs.iter().filter(|&&q| q >= 0.5).count() as f64;
                (p, vote_entropy(votes / t))
            })
            .collect())
    }
}

/// Binary entropy (bits) of the erroneous-vote fraction, with 0 log 0 = 0.
pub fn vote_entropy(v: f64) -> f64 {
    let h = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    h(v) + h(1.0 - v)
}

/// `max(p, 1 - p)` per entry.
pub fn certainty(probabilities: &[f64]) -> Vec<f64> {
    probabilities.iter().map(|&p| p.max(1.0 - p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable(n: usize) -> (Matrix, Vec<bool>) {
        let xs: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![if i % 2 == 0 { -1.0 } else { 1.0 }, (i % 5) as f64, 0.5])
            .collect();
        let y = (0..n).map(|i| i % 2 == 1).collect();
        (Matrix::from_rows(&xs), y)
    }

    #[test]
    fn entropy_values() {
        assert_eq!(vote_entropy(0.0), 0.0);
        assert_eq!(vote_entropy(1.0), 0.0);
        assert!((vote_entropy(0.5) - 1.0).abs() < 1e-15);
        // frozen from an mpmath evaluation
        assert!((vote_entropy(0.25) - 0.811_278_124_459_132_9).abs() < 1e-15);
    }

    #[test]
    fn certainty_values() {
        assert_eq!(certainty(&[0.2, 0.5, 1.0]), vec![0.8, 0.5, 1.0]);
        assert_eq!(certainty(&[0.9, 0.1]), vec![0.9, 0.9]);
    }

    #[test]
    fn single_class_is_constant() {
        let (x, _) = separable(6);
        let c = Committee::train(&x, &[false; 6], default_grid()[0], 5, 1);
        assert!(c.is_constant());
        assert!(c.predict_proba(&x).unwrap().iter().all(|&p| (p - 0.01).abs() < 1e-15));
        assert!(c.disagreement(&x).unwrap().iter().all(|&d| d == 0.0));
        let c = Committee::train(&x, &[true; 6], default_grid()[0], 5, 1);
        assert!((c.predict_proba(&x).unwrap()[0] - 0.99).abs() < 1e-15);
    }

    #[test]
    fn separable_training_set_is_fit_perfectly() {
        let (x, y) = separable(8);
        let c = Committee::train(&x, &y, Hyperparams { max_depth: 4, min_leaf: 1 }, 25, 7);
        let p = c.predict_proba(&x).unwrap();
        for (pi, yi) in p.iter().zip(&y) {
            assert_eq!(*pi >= 0.5, *yi);
            assert!((0.0..=1.0).contains(pi));
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let (x, y) = separable(20);
        let hp = Hyperparams { max_depth: 8, min_leaf: 1 };
        let a = Committee::train(&x, &y, hp, 10, 3);
        let b = Committee::train(&x, &y, hp, 10, 3);
        assert_eq!(a, b);
        assert_eq!(a.predict_proba(&x).unwrap(), b.predict_proba(&x).unwrap());
    }

    #[test]
    fn one_tree_never_disagrees() {
        let (x, y) = separable(20);
        let c = Committee::train(&x, &y, Hyperparams { max_depth: 8, min_leaf: 1 }, 1, 3);
        assert!(c.disagreement(&x).unwrap().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn feature_length_is_checked() {
        let (x, y) = separable(8);
        let c = Committee::train(&x, &y, Hyperparams { max_depth: 4, min_leaf: 1 }, 3, 1);
        let wrong = Matrix::zeros(2, 5);
        assert!(matches!(c.predict_proba(&wrong), Err(Error::FeatureLengthMismatch { expected: 3, found: 5 })));
    }

    #[test]
    fn class_weights_balance_totals() {
        let w = class_weights(&[true, false, false, false]);
        assert_eq!(w, [2.0, 4.0 / 6.0]);
    }
}
