//! Distinct-value batch generation within one column.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::LabelStore;
use crate::table::{CellRef, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Initialization,
    Active,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchCell {
    pub row: usize,
    pub col: usize,
    pub value: String,
    /// Committee vote entropy; absent during initialization.
    pub disagreement: Option<f64>,
    pub certainty: Option<f64>,
}

impl BatchCell {
    pub fn cell(&self) -> CellRef {
        CellRef::new(self.row, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRequest {
    pub phase: Phase,
    pub iteration: u32,
    pub column: usize,
    pub column_name: String,
    pub cells: Vec<BatchCell>,
}

impl BatchRequest {
    pub fn cell_refs(&self) -> Vec<CellRef> {
        self.cells.iter().map(BatchCell::cell).collect()
    }
}

/// Rows of column `col` to query next.
///
/// Unlabeled cells are ranked by descending disagreement, then ascending
/// certainty, then ascending row. Cells are taken greedily while their value
/// is new to the batch; remaining slots are filled with the best skipped
/// duplicates.
pub fn generate_batch(
    table: &Table,
    col: usize,
    store: &LabelStore,
    disagreement: &[f64],
    certainty: &[f64],
    k: usize,
) -> Result<Vec<usize>> {
    let mut ranked: Vec<usize> = (0..table.n_rows())
        .filter(|&r| !store.contains(CellRef::new(r, col)))
        .collect();
    if ranked.is_empty() {
        return Err(Error::ColumnExhausted(col));
    }
    ranked.sort_by(|&a, &b| {
        disagreement[b]
            .total_cmp(&disagreement[a])
            .then(certainty[a].total_cmp(&certainty[b]))
            .then(a.cmp(&b))
    });
    let size = k.min(ranked.len());
    let mut seen = HashSet::new();
    let mut batch = Vec::with_capacity(size);
    let mut skipped = Vec::new();
    for &r in &ranked {
        if batch.len() == size {
            break;
        }
        if seen.insert(table.get(r, col)) {
            batch.push(r);
        } else {
            skipped.push(r);
        }
    }
    let missing = size - batch.len();
    batch.extend(skipped.into_iter().take(missing));
    Ok(batch)
}
