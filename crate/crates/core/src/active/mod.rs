//! Two-dimensional active learning: frequency-ranked initialization, column
//! selection, distinct-value batches, and the session that ties them to the
//! per-column classifiers.

pub mod batch;
pub mod config;
pub mod init;
pub mod labeler;
pub mod selector;
pub mod session;

pub use batch::{generate_batch, BatchCell, BatchRequest, Phase};
pub use config::{SessionConfig, Strategy};
pub use labeler::{Labeler, OracleLabeler};
pub use selector::{ColumnMetrics, SelectorState};
pub use session::{ColumnSummary, IterationSummary, PendingBatch, Session, SessionSnapshot, Stage};
