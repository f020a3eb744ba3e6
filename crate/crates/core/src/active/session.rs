//! The active-learning state machine.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::batch::{generate_batch, BatchCell, BatchRequest, Phase};
use super::config::SessionConfig;
use super::init;
use super::labeler::Labeler;
use super::selector::{ColumnMetrics, SelectorState};
use crate::classifier::{explain, grid_search, train_surrogate, ColumnModel, Committee, Explanation};
use crate::embedding::{train_embedding, EmbeddingConfig};
use crate::error::{Error, Result};
use crate::evaluation::{score, DetectionResult, Score};
use crate::featurizer::{ErrorProbabilityBlock, FeatureSpace};
use crate::labels::{Label, LabelSource, LabelStore, LabelValue};
use crate::seed;
use crate::table::{CellRef, GroundTruth, Table};

pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum Stage {
    Initializing { column: usize },
    Active,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingBatch {
    pub phase: Phase,
    pub column: usize,
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub column: usize,
    pub name: String,
    pub labels: usize,
    pub erroneous_labels: usize,
    pub correct_labels: usize,
    pub mean_certainty: f64,
    pub cv_f1: f64,
    pub prediction_change: f64,
    pub degenerate: bool,
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationSummary {
    pub iteration: u32,
    /// Column retrained in this iteration; `None` for the initial training
    /// pass over all columns.
    pub column: Option<usize>,
    pub labels_used: usize,
    pub per_column: Vec<ColumnSummary>,
    /// Cell-wise score of the current predictions, when ground truth is
    /// attached.
    pub global: Option<Score>,
}

/// Everything needed to resume a session on the same table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub format_version: u32,
    pub config: SessionConfig,
    pub config_fingerprint: String,
    pub table_fingerprint: String,
    pub iteration: u32,
    pub stage: Stage,
    pub labels: Vec<Label>,
    pub models: Vec<Option<ColumnModel>>,
    pub degenerate: Vec<bool>,
    pub block: ErrorProbabilityBlock,
    pub selector: SelectorState,
    pub pending: Option<PendingBatch>,
    pub history: Vec<IterationSummary>,
}

impl SessionSnapshot {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshot serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format_version: u32,
        }
        let header: Header = serde_json::from_str(text).map_err(|e| Error::Decode(e.to_string()))?;
        if header.format_version != SNAPSHOT_VERSION {
            return Err(Error::VersionMismatch {
                found: header.format_version,
                expected: SNAPSHOT_VERSION,
            });
        }
        serde_json::from_str(text).map_err(|e| Error::Decode(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// SHA-256 of the table's CSV serialization.
pub fn table_fingerprint(table: &Table) -> String {
    hex::encode(Sha256::digest(table.to_csv_string().as_bytes()))
}

pub struct Session {
    table: Arc<Table>,
    truth: Option<Arc<GroundTruth>>,
    config: SessionConfig,
    features: FeatureSpace,
    probe_orders: Vec<Vec<String>>,
    iteration: u32,
    stage: Stage,
    store: LabelStore,
    models: Vec<Option<ColumnModel>>,
    degenerate: Vec<bool>,
    block: ErrorProbabilityBlock,
    selector: SelectorState,
    pending: Option<PendingBatch>,
    history: Vec<IterationSummary>,
}

fn build_features(table: &Table, config: &SessionConfig) -> Result<FeatureSpace> {
    let embedding = (config.features.embedding_dim > 0)
        .then(|| train_embedding(table, &EmbeddingConfig::new(config.features.embedding_dim, config.seed)));
    FeatureSpace::build(table, &config.features, embedding.as_ref())
}

impl Session {
    /// Featurizes the table and prepares the first initialization batch.
    pub fn new(table: Arc<Table>, truth: Option<Arc<GroundTruth>>, config: SessionConfig) -> Result<Self> {
        config.validate(table.n_cols())?;
        if let Some(t) = &truth {
            crate::table::attach_ground_truth(&table, t.table().clone())?;
        }
        let features = build_features(&table, &config)?;
        let (n, m) = (table.n_rows(), table.n_cols());
        let probe_orders = (0..m).map(|j| init::probe_order(&table, j)).collect();
        let mut s = Self {
            selector: SelectorState::new(config.strategy, config.seed),
            table,
            truth,
            features,
            probe_orders,
            iteration: 0,
            stage: Stage::Initializing { column: 0 },
            store: LabelStore::new(n, m),
            models: vec![None; m],
            degenerate: vec![false; m],
            block: ErrorProbabilityBlock::new(n, m),
            pending: None,
            history: Vec::new(),
            config,
        };
        s.advance_init()?;
        Ok(s)
    }

    /// Rebuilds a session from a snapshot of a session over `table`.
    pub fn restore(table: Arc<Table>, truth: Option<Arc<GroundTruth>>, snapshot: SessionSnapshot) -> Result<Self> {
        if snapshot.format_version != SNAPSHOT_VERSION {
            return Err(Error::VersionMismatch {
                found: snapshot.format_version,
                expected: SNAPSHOT_VERSION,
            });
        }
        if snapshot.table_fingerprint != table_fingerprint(&table) {
            return Err(Error::Decode("snapshot was taken on a different table".into()));
        }
        if snapshot.config_fingerprint != snapshot.config.fingerprint() {
            return Err(Error::Decode("snapshot config does not match its fingerprint".into()));
        }
        let m = table.n_cols();
        if snapshot.models.len() != m || snapshot.degenerate.len() != m || snapshot.block.n_cols() != m {
            return Err(Error::Decode("snapshot column count does not match the table".into()));
        }
        let mut store = LabelStore::new(table.n_rows(), m);
        let rejected = store.submit(&snapshot.labels)?;
        if !rejected.is_empty() {
            return Err(Error::Decode("snapshot holds duplicate labels".into()));
        }
        let features = build_features(&table, &snapshot.config)?;
        let probe_orders = (0..m).map(|j| init::probe_order(&table, j)).collect();
        Ok(Self {
            table,
            truth,
            config: snapshot.config,
            features,
            probe_orders,
            iteration: snapshot.iteration,
            stage: snapshot.stage,
            store,
            models: snapshot.models,
            degenerate: snapshot.degenerate,
            block: snapshot.block,
            selector: snapshot.selector,
            pending: snapshot.pending,
            history: snapshot.history,
        })
    }

    pub fn snapshot(&self) -> SessionSnapshot {
        SessionSnapshot {
            format_version: SNAPSHOT_VERSION,
            config: self.config.clone(),
            config_fingerprint: self.config.fingerprint(),
            table_fingerprint: table_fingerprint(&self.table),
            iteration: self.iteration,
            stage: self.stage,
            labels: self.store.iter().copied().collect(),
            models: self.models.clone(),
            degenerate: self.degenerate.clone(),
            block: self.block.clone(),
            selector: self.selector.clone(),
            pending: self.pending.clone(),
            history: self.history.clone(),
        }
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn truth(&self) -> Option<&GroundTruth> {
        self.truth.as_deref()
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn features(&self) -> &FeatureSpace {
        &self.features
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn is_finished(&self) -> bool {
        self.stage == Stage::Finished
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn labels(&self) -> &LabelStore {
        &self.store
    }

    pub fn labels_used(&self) -> usize {
        self.store.len()
    }

    pub fn remaining_budget(&self) -> usize {
        self.config.budget.saturating_sub(self.store.len())
    }

    pub fn model(&self, col: usize) -> Option<&ColumnModel> {
        self.models.get(col).and_then(Option::as_ref)
    }

    pub fn is_degenerate(&self, col: usize) -> bool {
        self.degenerate[col]
    }

    pub fn error_block(&self) -> &ErrorProbabilityBlock {
        &self.block
    }

    pub fn history(&self) -> &[IterationSummary] {
        &self.history
    }

    pub fn pending(&self) -> Option<&PendingBatch> {
        self.pending.as_ref()
    }

    /// The batch waiting for labels, with per-cell rationale.
    pub fn pending_batch(&self) -> Option<BatchRequest> {
        let p = self.pending.as_ref()?;
        let model = match p.phase {
            Phase::Active => self.model(p.column),
            Phase::Initialization => None,
        };
        let cells = p
            .rows
            .iter()
            .map(|&row| BatchCell {
                row,
                col: p.column,
                value: self.table.get(row, p.column).to_string(),
                disagreement: model.map(|m| m.disagreement[row]),
                certainty: model.map(|m| {
                    let q = m.probabilities[row];
                    q.max(1.0 - q)
                }),
            })
            .collect();
        Some(BatchRequest {
            phase: p.phase,
            iteration: self.label_iteration(p.phase),
            column: p.column,
            column_name: self.table.column_name(p.column).to_string(),
            cells,
        })
    }

    fn label_iteration(&self, phase: Phase) -> u32 {
        match phase {
            Phase::Initialization => 0,
            Phase::Active => self.iteration + 1,
        }
    }

    /// Records labels for exactly the cells of the pending batch and moves
    /// the session forward. Returns the summary of a completed training
    /// iteration, if this submission completed one.
    pub fn submit(
        &mut self,
        answers: &[(CellRef, LabelValue)],
        source: LabelSource,
    ) -> Result<Option<IterationSummary>> {
        let pending = self
            .pending
            .clone()
            .ok_or_else(|| Error::LabelMismatch("no batch is pending".into()))?;
        let expected: BTreeSet<CellRef> = pending.rows.iter().map(|&r| CellRef::new(r, pending.column)).collect();
        let given: BTreeSet<CellRef> = answers.iter().map(|(c, _)| *c).collect();
        if given.len() != answers.len() {
            return Err(Error::LabelMismatch("a cell is labeled more than once".into()));
        }
        if given != expected {
            return Err(Error::LabelMismatch(format!(
                "expected labels for {} cells of column {}, got a different set",
                expected.len(),
                pending.column
            )));
        }
        let iteration = self.label_iteration(pending.phase);
        let labels: Vec<Label> = answers
            .iter()
            .map(|&(c, v)| Label::new(c, v, source, iteration))
            .collect();
        self.store.submit(&labels)?;
        self.pending = None;
        match pending.phase {
            Phase::Initialization => self.advance_init(),
            Phase::Active => {
                self.iteration += 1;
                self.train_column(pending.column)?;
                let summary = self.summarize(Some(pending.column))?;
                self.history.push(summary.clone());
                self.select_next()?;
                Ok(Some(summary))
            }
        }
    }

    /// Moves through initialization until a probe batch is needed or every
    /// column is done, in which case all columns are trained.
    fn advance_init(&mut self) -> Result<Option<IterationSummary>> {
        let Stage::Initializing { mut column } = self.stage else {
            return Ok(None);
        };
        while column < self.table.n_cols() {
            let rows: Vec<usize> = init::next_probes(
                &self.table,
                column,
                &self.probe_orders[column],
                &self.store,
                self.config.init_cap,
                self.remaining_budget(),
            )
            .into_iter()
            .map(|c| c.row)
            .collect();
            if !rows.is_empty() {
                self.stage = Stage::Initializing { column };
                self.pending = Some(PendingBatch {
                    phase: Phase::Initialization,
                    column,
                    rows,
                });
                return Ok(None);
            }
            column += 1;
        }
        self.finish_init().map(Some)
    }

    fn finish_init(&mut self) -> Result<IterationSummary> {
        for j in 0..self.table.n_cols() {
            let c = self.store.counts(j);
            self.degenerate[j] = c.erroneous == 0 || c.correct == 0;
            if c.total() > 0 {
                self.train_column(j)?;
            }
        }
        self.stage = Stage::Active;
        let summary = self.summarize(None)?;
        self.history.push(summary.clone());
        let selectable = self.selectable().iter().filter(|&&s| s).count();
        self.selector.begin(selectable);
        self.select_next()?;
        Ok(summary)
    }

    fn labeled(&self, col: usize) -> (Vec<usize>, Vec<bool>) {
        self.store.column(col).iter().map(|l| (l.row, l.label.is_error())).unzip()
    }

    fn train_column(&mut self, col: usize) -> Result<()> {
        let (rows, y) = self.labeled(col);
        let x = self.features.rows_matrix(col, &rows, &self.block);
        let it = u64::from(self.iteration);
        let c = self.config.clone();
        let (hp, cv) = grid_search(
            &x,
            &y,
            &c.grid,
            c.cv_folds,
            c.n_trees,
            seed::derive(c.seed, &[seed::CV, col as u64, it]),
        );
        let committee = Committee::train(&x, &y, hp, c.n_trees, seed::derive(c.seed, &[seed::TRAIN, col as u64, it]));
        let full = self.features.matrix(col, &self.block);
        let scores = committee.score(&full.values)?;
        let previous = self.models[col].as_ref().map(|m| m.predictions.clone());
        let model = ColumnModel::new(col, committee, hp, cv, scores, previous);
        self.block.refresh(col, &model.probabilities)?;
        self.models[col] = Some(model);
        Ok(())
    }

    fn unlabeled_count(&self, col: usize) -> usize {
        self.table.n_rows() - self.store.counts(col).total()
    }

    fn selectable(&self) -> Vec<bool> {
        (0..self.table.n_cols())
            .map(|j| !self.degenerate[j] && self.models[j].is_some() && self.unlabeled_count(j) > 0)
            .collect()
    }

    /// Selection metrics of one column; untrained columns report zeros.
    pub fn metrics(&self, col: usize) -> ColumnMetrics {
        let Some(m) = self.model(col) else {
            return ColumnMetrics {
                mean_certainty: 0.0,
                cv_f1: 0.0,
                prediction_change: 0.0,
            };
        };
        let (mut sum, mut n) = (0.0, 0usize);
        for (row, &p) in m.probabilities.iter().enumerate() {
            if !self.store.contains(CellRef::new(row, col)) {
                sum += p.max(1.0 - p);
                n += 1;
            }
        }
        ColumnMetrics {
            mean_certainty: if n == 0 { 1.0 } else { sum / n as f64 },
            cv_f1: m.cv.mean_f1,
            prediction_change: m.prediction_change(),
        }
    }

    fn select_next(&mut self) -> Result<()> {
        let budget = self.remaining_budget();
        if budget == 0 {
            self.stage = Stage::Finished;
            return Ok(());
        }
        let metrics: Vec<ColumnMetrics> = (0..self.table.n_cols()).map(|j| self.metrics(j)).collect();
        let selectable = self.selectable();
        let col = match self.selector.select(&metrics, &selectable, u64::from(self.iteration)) {
            Ok(c) => c,
            Err(Error::NoSelectableColumn) => {
                self.stage = Stage::Finished;
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        let model = self.models[col].as_ref().ok_or(Error::NotTrained(col))?;
        let certainty = model.certainties();
        let rows = generate_batch(
            &self.table,
            col,
            &self.store,
            &model.disagreement,
            &certainty,
            self.config.batch_size.min(budget),
        )?;
        self.pending = Some(PendingBatch {
            phase: Phase::Active,
            column: col,
            rows,
        });
        Ok(())
    }

    pub fn column_summaries(&self) -> Vec<ColumnSummary> {
        (0..self.table.n_cols())
            .map(|j| {
                let c = self.store.counts(j);
                let m = self.metrics(j);
                ColumnSummary {
                    column: j,
                    name: self.table.column_name(j).to_string(),
                    labels: c.total(),
                    erroneous_labels: c.erroneous,
                    correct_labels: c.correct,
                    mean_certainty: m.mean_certainty,
                    cv_f1: m.cv_f1,
                    prediction_change: m.prediction_change,
                    degenerate: self.degenerate[j],
                }
            })
            .collect()
    }

    fn summarize(&self, column: Option<usize>) -> Result<IterationSummary> {
        Ok(IterationSummary {
            iteration: self.iteration,
            column,
            labels_used: self.labels_used(),
            per_column: self.column_summaries(),
            global: self.score()?,
        })
    }

    /// Estimated error probability of a cell from its column's latest model.
    pub fn probability(&self, cell: CellRef) -> Option<f64> {
        self.model(cell.col).map(|m| m.probabilities[cell.row])
    }

    /// Labels decide labeled cells; elsewhere the latest model's
    /// probability at or above 0.5 marks an error.
    pub fn final_predictions(&self) -> DetectionResult {
        let (n, m) = (self.table.n_rows(), self.table.n_cols());
        let mut result = DetectionResult::new(n, m);
        for col in 0..m {
            let model = self.model(col);
            for row in 0..n {
                let cell = CellRef::new(row, col);
                let flag = match self.store.get(cell) {
                    Some(l) => l.label.is_error(),
                    None => model.is_some_and(|md| md.predictions[row]),
                };
                result.set(cell, flag);
            }
        }
        result
    }

    /// Score of the current predictions against the attached ground truth.
    pub fn score(&self) -> Result<Option<Score>> {
        match &self.truth {
            Some(t) => Ok(Some(score(&self.final_predictions(), &self.table, t)?)),
            None => Ok(None),
        }
    }

    /// Decision path of a surrogate tree trained on the column's labels.
    pub fn explain(&self, cell: CellRef) -> Result<Explanation> {
        self.table.check(cell)?;
        if self.model(cell.col).is_none() {
            return Err(Error::NotTrained(cell.col));
        }
        let (rows, y) = self.labeled(cell.col);
        let x = self.features.rows_matrix(cell.col, &rows, &self.block);
        let tree = train_surrogate(&x, &y);
        let v = self.features.cell_vector(cell, &self.block);
        Ok(explain(&tree, &v.values, &self.features.registry(cell.col)))
    }

    /// Drives the session to completion, asking `labeler` for every batch.
    pub fn run_to_end(&mut self, labeler: &mut dyn Labeler) -> Result<()> {
        while let Some(batch) = self.pending_batch() {
            let cells = batch.cell_refs();
            let values = labeler.label(&self.table, &cells)?;
            let answers: Vec<(CellRef, LabelValue)> = cells.into_iter().zip(values).collect();
            self.submit(&answers, labeler.source())?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Session")
            .field("stage", &self.stage)
            .field("iteration", &self.iteration)
            .field("labels_used", &self.store.len())
            .field("budget", &self.config.budget)
            .finish()
    }
}
