//! Scoring, synthetic error injection, convergence curves and benchmark
//! table generators.

pub mod convergence;
pub mod inject;
pub mod metrics;
pub mod oracle;
pub mod synth;

pub use convergence::{record_convergence, AggregatePoint, ConvergencePoint};
pub use inject::{inject_errors, ErrorSpec, InjectionPlan, Mutation};
pub use metrics::{precision_recall_f1, score, score_column, DetectionResult, Score};
pub use oracle::oracle_label;
