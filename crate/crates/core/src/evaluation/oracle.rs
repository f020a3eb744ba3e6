use crate::error::Result;
use crate::labels::{Label, LabelSource, LabelValue};
use crate::table::{CellRef, GroundTruth, Table};

/// Erroneous iff the dirty value differs from the clean one (exact string
/// comparison).
pub fn oracle_label(dirty: &Table, truth: &GroundTruth, cell: CellRef) -> Result<Label> {
    let value = dirty.try_get(cell)?;
    truth.table().check(cell)?;
    let label = LabelValue::from_bool(value != truth.get(cell.row, cell.col));
    Ok(Label::new(cell, label, LabelSource::Oracle, 0))
}
