//! User-provided labels and the store that accumulates them.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::CellRef;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelValue {
    Erroneous,
    Correct,
}

impl LabelValue {
    pub fn is_error(self) -> bool {
        self == LabelValue::Erroneous
    }

    pub fn from_bool(is_error: bool) -> Self {
        if is_error {
            LabelValue::Erroneous
        } else {
            LabelValue::Correct
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelSource {
    Human,
    Oracle,
}

/// One labeled cell. Also the JSONL line format for label exports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Label {
    pub row: usize,
    pub col: usize,
    pub label: LabelValue,
    pub source: LabelSource,
    pub iteration: u32,
}

impl Label {
    pub fn new(cell: CellRef, label: LabelValue, source: LabelSource, iteration: u32) -> Self {
        Self {
            row: cell.row,
            col: cell.col,
            label,
            source,
            iteration,
        }
    }

    pub fn cell(&self) -> CellRef {
        CellRef::new(self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnCounts {
    pub erroneous: usize,
    pub correct: usize,
}

impl ColumnCounts {
    pub fn total(&self) -> usize {
        self.erroneous + self.correct
    }

    fn bump(&mut self, v: LabelValue, up: bool) {
        let slot = match v {
            LabelValue::Erroneous => &mut self.erroneous,
            LabelValue::Correct => &mut self.correct,
        };
        if up {
            *slot += 1;
        } else {
            *slot -= 1;
        }
    }
}

/// A partial map from cells to labels. At most one label per cell:
/// resubmissions are rejected rather than overwritten.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelStore {
    n_rows: usize,
    n_cols: usize,
    labels: BTreeMap<CellRef, Label>,
    counts: Vec<ColumnCounts>,
}

impl LabelStore {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            labels: BTreeMap::new(),
            counts: vec![ColumnCounts::default(); n_cols],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, cell: CellRef) -> Option<&Label> {
        self.labels.get(&cell)
    }

    pub fn contains(&self, cell: CellRef) -> bool {
        self.labels.contains_key(&cell)
    }

    pub fn counts(&self, col: usize) -> ColumnCounts {
        self.counts[col]
    }

    /// All labels in (row, col) order.
    pub fn iter(&self) -> impl Iterator<Item = &Label> + '_ {
        self.labels.values()
    }

    /// Labels of one column, ordered by row.
    pub fn column(&self, col: usize) -> Vec<&Label> {
        let mut out: Vec<&Label> = self.labels.values().filter(|l| l.col == col).collect();
        out.sort_by_key(|l| l.row);
        out
    }

    fn check(&self, cell: CellRef) -> Result<()> {
        if cell.row < self.n_rows && cell.col < self.n_cols {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                row: cell.row,
                col: cell.col,
            })
        }
    }

    /// Records every label whose cell is not yet labeled. Returns the cells
    /// that were rejected as duplicates. The batch is bounds-checked as a
    /// whole before anything is recorded.
    pub fn submit(&mut self, batch: &[Label]) -> Result<Vec<CellRef>> {
        for l in batch {
            self.check(l.cell())?;
        }
        let mut rejected = Vec::new();
        for l in batch {
            let cell = l.cell();
            if self.labels.contains_key(&cell) {
                rejected.push(cell);
                continue;
            }
            self.labels.insert(cell, *l);
            self.counts[l.col].bump(l.label, true);
        }
        self.debug_check();
        Ok(rejected)
    }

    /// Removes a label so the cell can be relabeled.
    pub fn retract(&mut self, cell: CellRef) -> Option<Label> {
        let removed = self.labels.remove(&cell);
        if let Some(l) = removed {
            self.counts[l.col].bump(l.label, false);
        }
        self.debug_check();
        removed
    }

    /// Recounts per-column counters from the label set.
    pub fn recount(&self) -> Vec<ColumnCounts> {
        let mut counts = vec![ColumnCounts::default(); self.n_cols];
        for l in self.labels.values() {
            counts[l.col].bump(l.label, true);
        }
        counts
    }

    pub fn is_consistent(&self) -> bool {
        self.recount() == self.counts
    }

    fn debug_check(&self) {
        debug_assert!(self.is_consistent(), "label counters drifted");
    }

    /// Writes one JSON object per line.
    pub fn export_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for l in self.labels.values() {
            let line = serde_json::to_string(l).map_err(|e| Error::Decode(e.to_string()))?;
            writeln!(w, "{line}").map_err(|e| Error::io("<jsonl>", e))?;
        }
        Ok(())
    }

    /// Reads labels from JSONL, skipping blank lines.
    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<Label>> {
        let mut out = Vec::new();
        for line in r.lines() {
            let line = line.map_err(|e| Error::io("<jsonl>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(serde_json::from_str(&line).map_err(|e| Error::Decode(e.to_string()))?);
        }
        Ok(out)
    }
}
