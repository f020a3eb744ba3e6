//! A session labeled by a custom rule-based labeler, saved halfway and
//! resumed from its snapshot.
//!
//! cargo run --release --example resume_session

use std::sync::Arc;

use tabaudit::active::{Labeler, SessionSnapshot};
use tabaudit::evaluation::{inject_errors, synth};
use tabaudit::{CellRef, LabelSource, LabelValue, Session, SessionConfig, Strategy, Table};

/// Knows the expected shape of every payroll column.
struct FormatRules;

impl Labeler for FormatRules {
    fn source(&self) -> LabelSource {
        LabelSource::Human
    }

    fn label(&mut self, table: &Table, cells: &[CellRef]) -> tabaudit::Result<Vec<LabelValue>> {
        Ok(cells
            .iter()
            .map(|c| {
                let v = table.get(c.row, c.col);
                let ok = match table.column_name(c.col) {
                    "salary" | "bonus" => v.starts_with('$'),
                    _ => v.len() == 5 && v.as_bytes()[2] == b':',
                };
                LabelValue::from_bool(!ok)
            })
            .collect())
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let clean = synth::payroll(600, 4);
    let (dirty, truth) = inject_errors(&clean, &synth::payroll_plan(4))?;
    let (table, truth) = (Arc::new(dirty), Arc::new(truth));
    let config = SessionConfig::new(120, Strategy::MinCertainty, 4);

    let mut labeler = FormatRules;
    let mut session = Session::new(table.clone(), Some(truth.clone()), config)?;
    for _ in 0..6 {
        let Some(batch) = session.pending_batch() else { break };
        let cells = batch.cell_refs();
        let answers: Vec<_> = cells.iter().copied().zip(labeler.label(&table, &cells)?).collect();
        session.submit(&answers, labeler.source())?;
    }
    let path = std::env::temp_dir().join("tabaudit-resume.json");
    session.snapshot().save(&path)?;
    println!("saved after {} labels to {}", session.labels_used(), path.display());
    drop(session);

    let mut resumed = Session::restore(table, Some(truth), SessionSnapshot::load(&path)?)?;
    println!("resumed at {:?}, {} labels left", resumed.stage(), resumed.remaining_budget());
    resumed.run_to_end(&mut labeler)?;
    let s = resumed.score()?.expect("ground truth attached");
    println!("F1 {:.3} (P {:.3}, R {:.3}) with {} labels", s.f1, s.precision, s.recall, resumed.labels_used());
    Ok(())
}
