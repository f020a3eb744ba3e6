//! Column selection.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::Strategy;
use crate::error::{Error, Result};
use crate::seed;

/// Metrics a strategy ranks columns by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnMetrics {
    /// Mean certainty over the column's unlabeled cells.
    pub mean_certainty: f64,
    /// Mean cross-validation F1 of the latest model.
    pub cv_f1: f64,
    /// Fraction of predictions that changed at the latest retrain.
    pub prediction_change: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectorState {
    pub strategy: Strategy,
    /// Round-robin position: the next column to consider.
    pub cursor: usize,
    /// Round-robin selections left before the strategy's own rule applies.
    pub warmup_remaining: usize,
    pub seed: u64,
}

impl SelectorState {
    pub fn new(strategy: Strategy, seed: u64) -> Self {
        Self {
            strategy,
            cursor: 0,
            warmup_remaining: 0,
            seed,
        }
    }

    /// Starts the warm-up pass over `selectable_columns` columns.
    pub fn begin(&mut self, selectable_columns: usize) {
        self.cursor = 0;
        self.warmup_remaining = if self.strategy.needs_warmup() {
            selectable_columns
        } else {
            0
        };
    }

    pub fn in_warmup(&self) -> bool {
        self.warmup_remaining > 0
    }

    /// Picks the next column. `draw` numbers random selections so they do
    /// not depend on how many came before.
    pub fn select(&mut self, metrics: &[ColumnMetrics], selectable: &[bool], draw: u64) -> Result<usize> {
        if !selectable.iter().any(|&s| s) {
            return Err(Error::NoSelectableColumn);
        }
        if self.warmup_remaining > 0 || self.strategy == Strategy::RoundRobin {
            self.warmup_remaining = self.warmup_remaining.saturating_sub(1);
            let col = round_robin(self.cursor, selectable)?;
            self.cursor = (col + 1) % selectable.len();
            return Ok(col);
        }
        match self.strategy {
            Strategy::Random => {
                let candidates: Vec<usize> = (0..selectable.len()).filter(|&j| selectable[j]).collect();
                let mut rng = seed::rng(self.seed, &[seed::SELECT, draw]);
                Ok(candidates[rng.random_range(0..candidates.len())])
            }
            Strategy::MinCertainty => {
                argmin(metrics.iter().map(|m| m.mean_certainty), selectable)
            }
            Strategy::MaxError => argmin(metrics.iter().map(|m| m.cv_f1), selectable),
            Strategy::MaxPredictionChange => {
                argmin(metrics.iter().map(|m| -m.prediction_change), selectable)
            }
            Strategy::RoundRobin => unreachable!("handled above"),
        }
    }
}

/// First selectable column at or after `cursor`, wrapping around.
pub fn round_robin(cursor: usize, selectable: &[bool]) -> Result<usize> {
    let m = selectable.len();
    (0..m)
        .map(|o| (cursor + o) % m)
        .find(|&j| selectable[j])
        .ok_or(Error::NoSelectableColumn)
}

/// Index of the smallest value among selectable columns; ties go to the
/// lowest index.
pub fn argmin(values: impl Iterator<Item = f64>, selectable: &[bool]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, v) in values.enumerate() {
        if !selectable[j] {
            continue;
        }
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((j, v));
        }
    }
    best.map(|(j, _)| j).ok_or(Error::NoSelectableColumn)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metrics(certainty: &[f64], cv: &[f64], change: &[f64]) -> Vec<ColumnMetrics> {
        (0..certainty.len())
            .map(|j| ColumnMetrics {
                mean_certainty: certainty[j],
                cv_f1: cv[j],
                prediction_change: change[j],
            })
            .collect()
    }

    #[test]
    fn metric_strategies() {
        let m = metrics(&[0.9, 0.6, 0.8], &[0.5, 0.7, 0.3], &[0.05, 0.0, 0.02]);
        let all = [true; 3];
        let pick = |s| SelectorState::new(s, 0).select(&m, &all, 0).unwrap();
        assert_eq!(pick(Strategy::MinCertainty), 1);
        assert_eq!(pick(Strategy::MaxError), 2);
        assert_eq!(pick(Strategy::MaxPredictionChange), 0);
    }

    #[test]
    fn ties_go_to_lowest_index_and_exclusions_apply() {
        let m = metrics(&[0.5, 0.5, 0.4], &[0.0; 3], &[0.0; 3]);
        let mut s = SelectorState::new(Strategy::MinCertainty, 0);
        assert_eq!(s.select(&m, &[true, true, false], 0).unwrap(), 0);
        assert!(matches!(s.select(&m, &[false; 3], 0), Err(Error::NoSelectableColumn)));
    }

    #[test]
    fn round_robin_cycles() {
        let m = metrics(&[0.0; 3], &[0.0; 3], &[0.0; 3]);
        let mut s = SelectorState::new(Strategy::RoundRobin, 0);
        let seq: Vec<usize> = (0..5).map(|_| s.select(&m, &[true; 3], 0).unwrap()).collect();
        assert_eq!(seq, [0, 1, 2, 0, 1]);
        let seq: Vec<usize> = (0..3).map(|_| s.select(&m, &[true, false, true], 0).unwrap()).collect();
        assert_eq!(seq, [2, 0, 2]);
    }

    #[test]
    fn warmup_precedes_metric_rule() {
        let m = metrics(&[0.9, 0.1, 0.9], &[0.0; 3], &[0.0; 3]);
        let mut s = SelectorState::new(Strategy::MinCertainty, 0);
        s.begin(3);
        let seq: Vec<usize> = (0..5).map(|_| s.select(&m, &[true; 3], 0).unwrap()).collect();
        assert_eq!(seq, [0, 1, 2, 1, 1]);
    }

    #[test]
    fn random_is_reproducible_per_draw() {
        let m = metrics(&[0.0; 4], &[0.0; 4], &[0.0; 4]);
        let sel = [true, false, true, true];
        let a: Vec<usize> = (0..20).map(|d| SelectorState::new(Strategy::Random, 7).select(&m, &sel, d).unwrap()).collect();
        let b: Vec<usize> = (0..20).map(|d| SelectorState::new(Strategy::Random, 7).select(&m, &sel, d).unwrap()).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|&j| j != 1));
    }
}
