//! Looks inside the feature space and asks why cells were flagged.
//!
//! cargo run --release --example explain_cells

use std::sync::Arc;

use tabaudit::evaluation::{inject_errors, synth};
use tabaudit::featurizer::{BlockKind, ErrorProbabilityBlock};
use tabaudit::{run_oracle, CellRef, SessionConfig, Strategy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let clean = synth::payroll(400, 1);
    let (dirty, truth) = inject_errors(&clean, &synth::payroll_plan(1))?;
    let session = run_oracle(Arc::new(dirty), Arc::new(truth.clone()), SessionConfig::new(80, Strategy::MinCertainty, 1))?;

    // Layout of one cell's feature vector.
    let features = session.features();
    let cell = CellRef::new(0, 0);
    let v = features.cell_vector(cell, &ErrorProbabilityBlock::new(features.n_rows(), features.n_cols()));
    println!("{} features per cell of column 0:", v.values.len());
    for b in &v.blocks {
        let kind = match b.kind {
            BlockKind::Ngram => "n-gram tf-idf",
            BlockKind::Metadata => "metadata",
            BlockKind::Embedding => "embedding",
            BlockKind::ErrorCorrelation => "error correlation",
        };
        println!("  {kind:<18} offset {:>4} len {:>4}", b.offset, b.len);
    }

    // Decision paths for a few unlabeled flagged cells.
    let table = session.table();
    let flagged: Vec<CellRef> = session
        .final_predictions()
        .flagged()
        .filter(|c| !session.labels().contains(*c))
        .take(5)
        .collect();
    for c in flagged {
        let e = session.explain(c)?;
        // The path comes from one shallow tree, so it can disagree with
        // the committee's probability.
        println!(
            "{}[{}] = {:?} (p {:.2}, actually {})\n    {}",
            table.column_name(c.col),
            c.row,
            table.get(c.row, c.col),
            session.probability(c).unwrap_or(0.0),
            if truth.is_error(table, c) { "wrong" } else { "fine" },
            e.render()
        );
    }
    Ok(())
}
