//! Binary decision trees grown with weighted Gini impurity.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    /// Samples with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    /// Class-weighted sample counts that reached the leaf.
    Leaf { erroneous: f64, correct: f64 },
}

impl TreeNode {
    /// Laplace-smoothed erroneous fraction of a leaf.
    pub fn leaf_probability(erroneous: f64, correct: f64) -> f64 {
        (erroneous + 1.0) / (erroneous + correct + 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Number of non-constant features examined per split; `None` examines
    /// all of them.
    pub max_features: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: TreeNode,
    pub n_features: usize,
}

/// One step of a root-to-leaf path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathStep {
    pub feature: usize,
    pub threshold: f64,
    pub went_left: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestSplit {
    pub feature: usize,
    pub threshold: f64,
    /// Decrease of weighted Gini impurity (weight-scaled).
    pub gain: f64,
}

/// Weight-scaled Gini impurity `W * (1 - sum p_c^2)`.
pub fn weighted_gini(erroneous: f64, correct: f64) -> f64 {
    let w = erroneous + correct;
    if w <= 0.0 {
        return 0.0;
    }
    w - (erroneous * erroneous + correct * correct) / w
}

struct Builder<'a, R> {
    x: &'a Matrix,
    y: &'a [bool],
    class_weight: [f64; 2],
    params: TreeParams,
    rng: &'a mut R,
    order: Vec<usize>,
}

fn sums(y: &[bool], w: [f64; 2], idx: &[usize]) -> (f64, f64) {
    idx.iter().fold((0.0, 0.0), |(e, c), &i| if y[i] { (e + w[0], c) } else { (e, c + w[1]) })
}

impl<R: Rng> Builder<'_, R> {
    fn build(&mut self, idx: &[usize], depth: usize) -> TreeNode {
        let (e, c) = sums(self.y, self.class_weight, idx);
        let pure = e == 0.0 || c == 0.0;
        if pure || depth >= self.params.max_depth || idx.len() < 2 * self.params.min_leaf.max(1) {
            return TreeNode::Leaf { erroneous: e, correct: c };
        }
        match self.best_split(idx, e, c) {
            None => TreeNode::Leaf { erroneous: e, correct: c },
            Some(s) => {
                let (l, r): (Vec<usize>, Vec<usize>) =
                    idx.iter().partition(|&&i| self.x.get(i, s.feature) <= s.threshold);
                TreeNode::Split {
                    feature: s.feature,
                    threshold: s.threshold,
                    left: Box::new(self.build(&l, depth + 1)),
                    right: Box::new(self.build(&r, depth + 1)),
                }
            }
        }
    }

    fn best_split(&mut self, idx: &[usize], e: f64, c: f64) -> Option<BestSplit> {
        let f = self.x.cols();
        let budget = self.params.max_features.unwrap_or(f);
        if self.params.max_features.is_some() {
            self.order.shuffle(self.rng);
        }
        let parent = weighted_gini(e, c);
        let mut best: Option<BestSplit> = None;
        let mut examined = 0;
        let mut vals: Vec<(f64, usize)> = Vec::with_capacity(idx.len());
        for k in 0..f {
            if examined >= budget {
                break;
            }
            let feat = self.order[k];
            vals.clear();
            vals.extend(idx.iter().map(|&i| (self.x.get(i, feat), i)));
            vals.sort_by(|a, b| a.0.total_cmp(&b.0));
            if vals[0].0 == vals[vals.len() - 1].0 {
                continue;
            }
            examined += 1;
            if let Some(s) = scan_feature(&vals, self.y, self.class_weight, self.params.min_leaf, parent, feat) {
                if best.is_none_or(|b| s.gain > b.gain) {
                    best = Some(s);
                }
            }
        }
        best.filter(|b| b.gain > 1e-12)
    }
}

/// Best threshold on one feature given `(value, sample)` pairs sorted by
/// value.
fn scan_feature(
    sorted: &[(f64, usize)],
    y: &[bool],
    w: [f64; 2],
    min_leaf: usize,
    parent: f64,
    feature: usize,
) -> Option<BestSplit> {
    let n = sorted.len();
    let (te, tc) = sorted.iter().fold((0.0, 0.0), |(e, c), &(_, i)| if y[i] { (e + w[0], c) } else { (e, c + w[1]) });
    let (mut le, mut lc) = (0.0, 0.0);
    let mut best: Option<BestSplit> = None;
    for k in 0..n - 1 {
        let (v, i) = sorted[k];
        if y[i] {
            le += w[0];
        } else {
            lc += w[1];
        }
        let next = sorted[k + 1].0;
        if v == next {
            continue;
        }
        let left_n = k + 1;
        if left_n < min_leaf || n - left_n < min_leaf {
            continue;
        }
        let gain = parent - weighted_gini(le, lc) - weighted_gini(te - le, tc - lc);
        if best.is_none_or(|b| gain > b.gain) {
            let mut threshold = v + (next - v) / 2.0;
            if threshold >= next {
                threshold = v;
            }
            best = Some(BestSplit { feature, threshold, gain });
        }
    }
    best
}

impl DecisionTree {
    /// Grows a tree on the samples listed in `idx` (duplicates allowed, as
    /// in a bootstrap). `class_weight` is `[erroneous, correct]`.
    pub fn fit<R: Rng>(
        x: &Matrix,
        y: &[bool],
        idx: &[usize],
        class_weight: [f64; 2],
        params: TreeParams,
        rng: &mut R,
    ) -> Self {
        assert_eq!(x.rows(), y.len(), "feature rows and labels differ");
        assert!(!idx.is_empty(), "cannot fit a tree on zero samples");
        let mut b = Builder {
            x,
            y,
            class_weight,
            params,
            rng,
            order: (0..x.cols()).collect(),
        };
        let root = b.build(idx, 0);
        Self {
            root,
            n_features: x.cols(),
        }
    }

    fn leaf(&self, row: &[f64]) -> (f64, f64) {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { erroneous, correct } => return (*erroneous, *correct),
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if row[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let (e, c) = self.leaf(row);
        TreeNode::leaf_probability(e, c)
    }

    /// Root-to-leaf path and the leaf's weighted counts.
    pub fn path(&self, row: &[f64]) -> (Vec<PathStep>, (f64, f64)) {
        let mut steps = Vec::new();
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { erroneous, correct } => return (steps, (*erroneous, *correct)),
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let went_left = row[*feature] <= *threshold;
                    steps.push(PathStep {
                        feature: *feature,
                        threshold: *threshold,
                        went_left,
                    });
                    node = if went_left { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn d(n: &TreeNode) -> usize {
            match n {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + d(left).max(d(right)),
            }
        }
        d(&self.root)
    }

    /// Features used by splits, in pre-order.
    pub fn split_features(&self) -> Vec<usize> {
        fn walk(n: &TreeNode, out: &mut Vec<usize>) {
            if let TreeNode::Split { feature, left, right, .. } = n {
                out.push(*feature);
                walk(left, out);
                walk(right, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn max_feature_index(&self) -> Option<usize> {
        self.split_features().into_iter().max()
    }
}

/// Best single split over all features with the full sample set, as used
/// for a depth-1 tree.
pub fn best_root_split(x: &Matrix, y: &[bool], class_weight: [f64; 2], min_leaf: usize) -> Option<BestSplit> {
    let idx: Vec<usize> = (0..x.rows()).collect();
    let (e, c) = sums(y, class_weight, &idx);
    let mut rng = crate::seed::rng(0, &[]);
    let mut b = Builder {
        x,
        y,
        class_weight,
        params: TreeParams {
            max_depth: 1,
            min_leaf,
            max_features: None,
        },
        rng: &mut rng,
        order: (0..x.cols()).collect(),
    };
    b.best_split(&idx, e, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(depth: usize) -> TreeParams {
        TreeParams {
            max_depth: depth,
            min_leaf: 1,
            max_features: None,
        }
    }

    #[test]
    fn separable_feature_gives_perfect_fit() {
        let xs: Vec<Vec<f64>> = (0..8).map(|i| vec![(i as f64) * 0.1, if i < 4 { -1.0 } else { 1.0 }]).collect();
        let x = Matrix::from_rows(&xs);
        let y: Vec<bool> = (0..8).map(|i| i >= 4).collect();
        let idx: Vec<usize> = (0..8).collect();
        let mut rng = crate::seed::rng(1, &[]);
        let t = DecisionTree::fit(&x, &y, &idx, [1.0, 1.0], params(4), &mut rng);
        for (i, &yi) in y.iter().enumerate() {
            assert_eq!(t.predict_row(x.row(i)) >= 0.5, yi);
        }
    }

    #[test]
    fn laplace_leaf() {
        assert!((TreeNode::leaf_probability(3.0, 1.0) - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn constant_features_make_a_leaf() {
        let x = Matrix::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]);
        let y = [true, false, true];
        let mut rng = crate::seed::rng(1, &[]);
        let t = DecisionTree::fit(&x, &y, &[0, 1, 2], [1.0, 1.0], params(4), &mut rng);
        assert_eq!(t.depth(), 0);
        assert!(matches!(t.root, TreeNode::Leaf { erroneous, correct } if erroneous == 2.0 && correct == 1.0));
    }

    #[test]
    fn min_leaf_blocks_small_children() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]);
        let y = [true, false, false, false];
        let mut rng = crate::seed::rng(1, &[]);
        let p = TreeParams {
            max_depth: 4,
            min_leaf: 2,
            max_features: None,
        };
        let t = DecisionTree::fit(&x, &y, &[0, 1, 2, 3], [1.0, 1.0], p, &mut rng);
        let (steps, _) = t.path(x.row(0));
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].threshold, 1.5);
    }

    #[test]
    fn path_length_bounded_by_depth() {
        let xs: Vec<Vec<f64>> = (0..40).map(|i| vec![(i % 7) as f64, (i % 3) as f64]).collect();
        let y: Vec<bool> = (0..40).map(|i| (i % 7) > 3 && (i % 3) == 1).collect();
        let x = Matrix::from_rows(&xs);
        let mut rng = crate::seed::rng(2, &[]);
        let t = DecisionTree::fit(&x, &y, &(0..40).collect::<Vec<_>>(), [1.0, 1.0], params(2), &mut rng);
        for i in 0..40 {
            assert!(t.path(x.row(i)).0.len() <= 2);
        }
    }
}
