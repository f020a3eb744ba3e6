use crate::error::Result;
use crate::evaluation::oracle_label;
use crate::labels::{LabelSource, LabelValue};
use crate::table::{CellRef, GroundTruth, Table};

/// Anything that can answer "is this cell erroneous?" for a batch.
pub trait Labeler {
    fn source(&self) -> LabelSource;

    fn label(&mut self, table: &Table, cells: &[CellRef]) -> Result<Vec<LabelValue>>;
}

/// Answers from a clean copy of the table.
#[derive(Debug, Clone, Copy)]
pub struct OracleLabeler<'a> {
    truth: &'a GroundTruth,
}

impl<'a> OracleLabeler<'a> {
    pub fn new(truth: &'a GroundTruth) -> Self {
        Self { truth }
    }
}

impl Labeler for OracleLabeler<'_> {
    fn source(&self) -> LabelSource {
        LabelSource::Oracle
    }

    fn label(&mut self, table: &Table, cells: &[CellRef]) -> Result<Vec<LabelValue>> {
        cells
            .iter()
            .map(|&c| oracle_label(table, self.truth, c).map(|l| l.label))
            .collect()
    }
}
