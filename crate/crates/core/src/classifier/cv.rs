//! Stratified k-fold cross-validation and grid search.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::committee::{is_single_class, Committee, Hyperparams};
use crate::dense::Matrix;
use crate::evaluation::metrics::precision_recall_f1;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: usize,
    /// F1 of the erroneous class on each held-out fold.
    pub fold_f1: Vec<f64>,
    pub mean_f1: f64,
    /// Set when the labels could not be stratified (fewer than two
    /// examples of some class); the mean is then 0.
    pub single_class: bool,
}

impl CvReport {
    fn unvalidated() -> Self {
        Self {
            folds: 0,
            fold_f1: Vec::new(),
            mean_f1: 0.0,
            single_class: true,
        }
    }
}

/// Fold index per sample. Each class is shuffled and dealt round-robin,
/// so every fold receives `floor` or `ceil` of each class's share.
pub fn stratified_folds(y: &[bool], k: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed, &[seed::CV]);
    let mut fold = vec![0; y.len()];
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        for (pos, i) in idx.into_iter().enumerate() {
            fold[i] = pos % k;
        }
    }
    fold
}

/// Folds actually used for a requested count: clamped to the minority class
/// size.
pub fn effective_folds(y: &[bool], requested: usize) -> usize {
    let ne = y.iter().filter(|&&b| b).count();
    requested.min(ne).min(y.len() - ne)
}

pub fn cross_validate(x: &Matrix, y: &[bool], hp: Hyperparams, k: usize, n_trees: usize, seed: u64) -> CvReport {
    let k = effective_folds(y, k);
    if is_single_class(y) || k < 2 {
        return CvReport::unvalidated();
    }
    let fold = stratified_folds(y, k, seed);
    let fold_f1: Vec<f64> = (0..k)
        .into_par_iter()
        .map(|f| {
            let train: Vec<usize> = (0..y.len()).filter(|&i| fold[i] != f).collect();
            let test: Vec<usize> = (0..y.len()).filter(|&i| fold[i] == f).collect();
            let ytrain: Vec<bool> = train.iter().map(|&i| y[i]).collect();
            let model = Committee::train(&x.select_rows(&train), &ytrain, hp, n_trees, seed::derive(seed, &[f as u64]));
            let p = model.predict_proba(&x.select_rows(&test)).expect("same feature width");
            let (mut tp, mut fp, mut fneg) = (0, 0, 0);
            for (&i, &pi) in test.iter().zip(&p) {
                match (pi >= 0.5, y[i]) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fneg += 1,
                    _ => {}
                }
            }
            precision_recall_f1(tp, fp, fneg).2
        })
        .collect();
    let mean_f1 = fold_f1.iter().sum::<f64>() / k as f64;
    CvReport {
        folds: k,
        fold_f1,
        mean_f1,
        single_class: false,
    }
}

/// Cross-validates every grid point and returns the best one. Ties go to the
/// smaller `max_depth`, then the larger `min_leaf`. Unvalidatable labels
/// return the first grid point.
pub fn grid_search(
    x: &Matrix,
    y: &[bool],
    grid: &[Hyperparams],
    k: usize,
    n_trees: usize,
    seed: u64,
) -> (Hyperparams, CvReport) {
    assert!(!grid.is_empty(), "grid must not be empty");
    if is_single_class(y) || effective_folds(y, k) < 2 {
        return (grid[0], CvReport::unvalidated());
    }
    let reports: Vec<CvReport> = grid
        .par_iter()
        .map(|hp| cross_validate(x, y, *hp, k, n_trees, seed))
        .collect();
    let mut best = 0;
    for i in 1..grid.len() {
        let (a, b) = (&reports[i], &reports[best]);
        let better = a.mean_f1 > b.mean_f1
            || (a.mean_f1 == b.mean_f1
                && (grid[i].max_depth < grid[best].max_depth
                    || (grid[i].max_depth == grid[best].max_depth && grid[i].min_leaf > grid[best].min_leaf)));
        if better {
            best = i;
        }
    }
    (grid[best], reports.into_iter().nth(best).expect("index in range"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable(n: usize) -> (Matrix, Vec<bool>) {
        let xs: Vec<Vec<f64>> = (0..n).map(|i| vec![if i % 3 == 0 { 5.0 } else { 1.0 }, (i % 4) as f64]).collect();
        (Matrix::from_rows(&xs), (0..n).map(|i| i % 3 == 0).collect())
    }

    #[test]
    fn separable_data_scores_one() {
        let (x, y) = separable(30);
        let r = cross_validate(&x, &y, Hyperparams { max_depth: 4, min_leaf: 1 }, 4, 10, 1);
        assert_eq!(r.folds, 4);
        assert_eq!(r.mean_f1, 1.0);
        let (_, best) = grid_search(&x, &y, &crate::classifier::default_grid(), 4, 10, 1);
        assert_eq!(best.mean_f1, 1.0);
    }

    #[test]
    fn single_class_cannot_be_validated() {
        let (x, _) = separable(10);
        let r = cross_validate(&x, &[false; 10], Hyperparams { max_depth: 4, min_leaf: 1 }, 4, 5, 1);
        assert!(r.single_class);
        assert_eq!(r.mean_f1, 0.0);
    }

    #[test]
    fn folds_clamped_to_minority() {
        let y = [true, true, true, false, false, false, false, false];
        assert_eq!(effective_folds(&y, 4), 3);
        let f = stratified_folds(&y, 3, 9);
        for k in 0..3 {
            assert_eq!((0..3).filter(|&i| f[i] == k).count(), 1);
        }
    }

    #[test]
    fn grid_tie_prefers_shallow_then_large_leaf() {
        let (x, y) = separable(30);
        let grid = [
            Hyperparams { max_depth: 8, min_leaf: 1 },
            Hyperparams { max_depth: 4, min_leaf: 1 },
            Hyperparams { max_depth: 4, min_leaf: 2 },
        ];
        let (hp, r) = grid_search(&x, &y, &grid, 4, 5, 2);
        assert_eq!(r.mean_f1, 1.0);
        assert_eq!(hp, Hyperparams { max_depth: 4, min_leaf: 2 });
    }

    #[test]
    fn one_point_grid() {
        let (x, y) = separable(12);
        let g = [Hyperparams { max_depth: 16, min_leaf: 5 }];
        assert_eq!(grid_search(&x, &y, &g, 4, 5, 2).0, g[0]);
    }
}
