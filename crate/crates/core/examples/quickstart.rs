//! Smallest end-to-end use: corrupt a generated table, let the ground truth
//! answer every query, and print what the detector found.
//!
//! cargo run --release --example quickstart

use std::sync::Arc;

use tabaudit::evaluation::{inject_errors, synth};
use tabaudit::{run_oracle, RunReport, SessionConfig, Strategy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let clean = synth::employees(500, 7);
    let (dirty, truth) = inject_errors(&clean, &synth::employees_plan(7))?;
    println!(
        "{} rows x {} columns, {} erroneous cells",
        dirty.n_rows(),
        dirty.n_cols(),
        truth.error_cells(&dirty).len()
    );

    let config = SessionConfig::new(250, Strategy::MinCertainty, 7);
    let session = run_oracle(Arc::new(dirty), Arc::new(truth), config)?;
    let report = RunReport::from_session(&session)?;
    println!(
        "F1 {:.3} after {} labels ({} iterations)",
        report.final_f1.unwrap_or(0.0),
        report.labels_used,
        report.iterations
    );

    let flagged: Vec<_> = session.final_predictions().flagged().take(8).collect();
    for cell in flagged {
        println!(
            "  row {:>3} {:<12} {:?}",
            cell.row,
            session.table().column_name(cell.col),
            session.table().get(cell.row, cell.col)
        );
    }
    Ok(())
}
