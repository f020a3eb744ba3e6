use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{CellRef, GroundTruth, Table};

/// Precision, recall and F1 from confusion counts.
///
/// No predictions means precision 1; no true errors means recall 1.
pub fn precision_recall_f1(tp: usize, fp: usize, fn_: usize) -> (f64, f64, f64) {
    let precision = if tp + fp == 0 { 1.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { 1.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Score {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let (precision, recall, f1) = precision_recall_f1(tp, fp, fn_);
        Score { precision, recall, f1 }
    }
}

/// Per-cell predictions for a whole table, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionResult {
    n_rows: usize,
    n_cols: usize,
    flags: Vec<bool>,
}

impl DetectionResult {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            flags: vec![false; n_rows * n_cols],
        }
    }

    pub fn from_columns(columns: &[Vec<bool>]) -> Self {
        let n_cols = columns.len();
        let n_rows = columns.first().map_or(0, Vec::len);
        let mut r = Self::new(n_rows, n_cols);
        for (c, col) in columns.iter().enumerate() {
            for (row, &f) in col.iter().enumerate() {
                r.set(CellRef::new(row, c), f);
            }
        }
        r
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_error(&self, cell: CellRef) -> bool {
        self.flags[cell.row * self.n_cols + cell.col]
    }

    pub fn set(&mut self, cell: CellRef, erroneous: bool) {
        self.flags[cell.row * self.n_cols + cell.col] = erroneous;
    }

    pub fn flagged(&self) -> impl Iterator<Item = CellRef> + '_ {
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| CellRef::new(i / self.n_cols, i % self.n_cols))
    }
}

fn check_shape(result: &DetectionResult, table: &Table) -> Result<()> {
    if result.n_rows != table.n_rows() {
        return Err(Error::ShapeMismatch(crate::error::ShapeDim::Rows));
    }
    if result.n_cols != table.n_cols() {
        return Err(Error::ShapeMismatch(crate::error::ShapeDim::Cols));
    }
    Ok(())
}

/// Cell-level score of `result` against the clean table.
pub fn score(result: &DetectionResult, dirty: &Table, truth: &GroundTruth) -> Result<Score> {
    check_shape(result, dirty)?;
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for row in 0..dirty.n_rows() {
        for col in 0..dirty.n_cols() {
            let cell = CellRef::new(row, col);
            match (result.is_error(cell), truth.is_error(dirty, cell)) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
    }
    Ok(Score::from_counts(tp, fp, fn_))
}

/// Score restricted to one column.
pub fn score_column(result: &DetectionResult, dirty: &Table, truth: &GroundTruth, col: usize) -> Result<Score> {
    check_shape(result, dirty)?;
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for row in 0..dirty.n_rows() {
        let cell = CellRef::new(row, col);
        match (result.is_error(cell), truth.is_error(dirty, cell)) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(Score::from_counts(tp, fp, fn_))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions() {
        assert_eq!(precision_recall_f1(0, 0, 0), (1.0, 1.0, 1.0));
        assert_eq!(precision_recall_f1(0, 0, 3), (1.0, 0.0, 0.0));
        assert_eq!(precision_recall_f1(0, 2, 0), (0.0, 1.0, 0.0));
        let (p, r, f) = precision_recall_f1(2, 1, 1);
        assert!((p - 2.0 / 3.0).abs() < 1e-15 && (r - 2.0 / 3.0).abs() < 1e-15 && (f - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn score_table() {
        let clean = Table::from_csv_str("a,b\n1,x\n2,y\n3,z\n", true).unwrap();
        let dirty = Table::from_csv_str("a,b\n1,x\n9,y\n3,q\n", true).unwrap();
        let gt = crate::table::attach_ground_truth(&dirty, clean).unwrap();
        let mut r = DetectionResult::new(3, 2);
        r.set(CellRef::new(1, 0), true);
        r.set(CellRef::new(0, 0), true);
        let s = score(&r, &dirty, &gt).unwrap();
        assert_eq!((s.precision, s.recall), (0.5, 0.5));
        let bad = DetectionResult::new(2, 2);
        assert!(score(&bad, &dirty, &gt).is_err());
    }
}
