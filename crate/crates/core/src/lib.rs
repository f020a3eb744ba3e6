pub mod active;
pub mod classifier;
pub mod dense;
pub mod embedding;
pub mod error;
pub mod evaluation;
pub mod featurizer;
pub mod labels;
pub mod report;
pub mod seed;
mod serde_f64;
pub mod table;

pub use active::{OracleLabeler, Session, SessionConfig, Strategy};
pub use error::{Error, Result};
pub use report::{run_oracle, run_oracle_observed, RunReport};
pub use labels::{Label, LabelSource, LabelStore, LabelValue};
pub use table::{attach_ground_truth, load_csv, CellRef, GroundTruth, Table};
