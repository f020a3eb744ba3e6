//! Run reports, run logs and the headless oracle loop.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::active::{ColumnSummary, IterationSummary, Labeler, OracleLabeler, Session, SessionConfig, Strategy};
use crate::error::{Error, Result};
use crate::evaluation::{score_column, ConvergencePoint, Score};
use crate::table::{GroundTruth, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnReport {
    #[serde(flatten)]
    pub summary: ColumnSummary,
    pub score: Option<Score>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub final_f1: Option<f64>,
    pub final_precision: Option<f64>,
    pub final_recall: Option<f64>,
    pub labels_used: usize,
    pub budget: usize,
    pub strategy: Strategy,
    pub seed: u64,
    pub iterations: u32,
    pub per_column: Vec<ColumnReport>,
    pub convergence_curve: Vec<ConvergencePoint>,
}

impl RunReport {
    pub fn from_session(session: &Session) -> Result<Self> {
        let global = session.score()?;
        let predictions = session.final_predictions();
        let per_column = session
            .column_summaries()
            .into_iter()
            .map(|summary| {
                let score = match session.truth() {
                    Some(t) => Some(score_column(&predictions, session.table(), t, summary.column)?),
                    None => None,
                };
                Ok(ColumnReport { summary, score })
            })
            .collect::<Result<_>>()?;
        Ok(RunReport {
            final_f1: global.map(|s| s.f1),
            final_precision: global.map(|s| s.precision),
            final_recall: global.map(|s| s.recall),
            labels_used: session.labels_used(),
            budget: session.config().budget,
            strategy: session.config().strategy,
            seed: session.config().seed,
            iterations: session.iteration(),
            per_column,
            convergence_curve: convergence_curve(session.history()),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

/// One point per iteration that was scored against ground truth.
pub fn convergence_curve(history: &[IterationSummary]) -> Vec<ConvergencePoint> {
    history
        .iter()
        .filter_map(|h| h.global.map(|s| ConvergencePoint::new(h.labels_used, s)))
        .collect()
}

/// Writes one JSON object per iteration.
pub fn write_run_log<W: Write>(history: &[IterationSummary], mut w: W) -> std::io::Result<()> {
    for h in history {
        serde_json::to_writer(&mut w, h)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Runs a whole session, answering every batch from the ground truth.
pub fn run_oracle(table: Arc<Table>, truth: Arc<GroundTruth>, config: SessionConfig) -> Result<Session> {
    run_oracle_observed(table, truth, config, |_| {})
}

/// Like [`run_oracle`], calling `observe` after every completed training
/// iteration.
pub fn run_oracle_observed(
    table: Arc<Table>,
    truth: Arc<GroundTruth>,
    config: SessionConfig,
    mut observe: impl FnMut(&Session),
) -> Result<Session> {
    let mut session = Session::new(table, Some(truth.clone()), config)?;
    let mut oracle = OracleLabeler::new(&truth);
    while let Some(batch) = session.pending_batch() {
        let cells = batch.cell_refs();
        let values = oracle.label(session.table(), &cells)?;
        let answers: Vec<_> = cells.into_iter().zip(values).collect();
        if session.submit(&answers, oracle.source())?.is_some() {
            observe(&session);
        }
    }
    Ok(session)
}
