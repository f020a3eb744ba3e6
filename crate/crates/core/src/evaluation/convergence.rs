//! Label-effort curves and their aggregation over repeated runs.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::metrics::Score;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub labels_used: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ConvergencePoint {
    pub fn new(labels_used: usize, s: Score) -> Self {
        Self {
            labels_used,
            precision: s.precision,
            recall: s.recall,
            f1: s.f1,
        }
    }
}

/// Mean and population standard deviation across runs at one label count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregatePoint {
    pub labels_used: usize,
    pub mean_f1: f64,
    pub std_f1: f64,
    pub mean_precision: f64,
    pub mean_recall: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Latest point of `curve` at or before `labels`.
fn carried(curve: &[ConvergencePoint], labels: usize) -> Option<&ConvergencePoint> {
    curve.iter().take_while(|p| p.labels_used <= labels).last()
}

/// Aligns runs on the union of their label counts, carrying each run's last
/// observation forward. The grid starts where every run has a point.
pub fn record_convergence(runs: &[Vec<ConvergencePoint>]) -> Result<Vec<AggregatePoint>> {
    if runs.is_empty() || runs.iter().any(Vec::is_empty) {
        return Err(Error::EmptyLog);
    }
    let start = runs.iter().map(|r| r[0].labels_used).max().expect("non-empty");
    let mut grid: Vec<usize> = runs.iter().flatten().map(|p| p.labels_used).filter(|&l| l >= start).collect();
    grid.sort_unstable();
    grid.dedup();
    Ok(grid
        .into_iter()
        .map(|labels| {
            let pts: Vec<&ConvergencePoint> = runs.iter().map(|r| carried(r, labels).expect("grid starts after every first point")).collect();
            let (mean_f1, std_f1) = mean_std(&pts.iter().map(|p| p.f1).collect::<Vec<_>>());
            let (mean_precision, _) = mean_std(&pts.iter().map(|p| p.precision).collect::<Vec<_>>());
            let (mean_recall, _) = mean_std(&pts.iter().map(|p| p.recall).collect::<Vec<_>>());
            AggregatePoint {
                labels_used: labels,
                mean_f1,
                std_f1,
                mean_precision,
                mean_recall,
            }
        })
        .collect())
}

/// Smallest label count at which `curve` reaches `f1`.
pub fn labels_to_reach(curve: &[ConvergencePoint], f1: f64) -> Option<usize> {
    curve.iter().find(|p| p.f1 >= f1).map(|p| p.labels_used)
}

/// F1 of `curve` at `labels` by last observation carried forward; 0 before
/// the first point.
pub fn f1_at(curve: &[ConvergencePoint], labels: usize) -> f64 {
    carried(curve, labels).map_or(0.0, |p| p.f1)
}

/// Summary of final scores over seeds, e.g. `0.87 ± 0.01`.
pub fn summarize_final(runs: &[Vec<ConvergencePoint>]) -> Result<(f64, f64)> {
    let finals: Vec<f64> = runs
        .iter()
        .map(|r| r.last().map(|p| p.f1).ok_or(Error::EmptyLog))
        .collect::<Result<_>>()?;
    if finals.is_empty() {
        return Err(Error::EmptyLog);
    }
    Ok(mean_std(&finals))
}

pub fn write_curve_csv<W: Write>(curve: &[AggregatePoint], mut w: W) -> std::io::Result<()> {
    writeln!(w, "labels_used,mean_f1,std_f1,mean_p,mean_r")?;
    for p in curve {
        writeln!(
            w,
            "{},{},{},{},{}",
            p.labels_used, p.mean_f1, p.std_f1, p.mean_precision, p.mean_recall
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(labels: usize, f1: f64) -> ConvergencePoint {
        ConvergencePoint {
            labels_used: labels,
            precision: f1,
            recall: f1,
            f1,
        }
    }

    #[test]
    fn single_run_has_zero_spread() {
        let agg = record_convergence(&[vec![pt(10, 0.5), pt(20, 0.7)]]).unwrap();
        assert!(agg.iter().all(|p| p.std_f1 == 0.0));
        assert_eq!(agg.len(), 2);
    }

    #[test]
    fn population_stddev() {
        let agg = record_convergence(&[vec![pt(10, 0.8)], vec![pt(10, 0.9)]]).unwrap();
        assert!((agg[0].mean_f1 - 0.85).abs() < 1e-12);
        assert!((agg[0].std_f1 - 0.05).abs() < 1e-12);
    }

    #[test]
    fn misaligned_runs_carry_forward() {
        let agg = record_convergence(&[vec![pt(10, 0.2), pt(30, 0.6)], vec![pt(10, 0.4), pt(20, 0.8)]]).unwrap();
        let ls: Vec<usize> = agg.iter().map(|p| p.labels_used).collect();
        assert_eq!(ls, [10, 20, 30]);
        assert!((agg[1].mean_f1 - 0.5).abs() < 1e-12);
        assert!((agg[2].mean_f1 - 0.7).abs() < 1e-12);
    }

    #[test]
    fn empty_logs() {
        assert!(matches!(record_convergence(&[]), Err(Error::EmptyLog)));
        assert!(matches!(record_convergence(&[vec![]]), Err(Error::EmptyLog)));
    }

    #[test]
    fn csv_header() {
        let agg = record_convergence(&[vec![pt(4, 0.5)]]).unwrap();
        let mut out = Vec::new();
        write_curve_csv(&agg, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "labels_used,mean_f1,std_f1,mean_p,mean_r\n4,0.5,0,0.5,0.5\n");
    }

    #[test]
    fn thresholds() {
        let c = [pt(10, 0.5), pt(20, 0.85), pt(30, 0.8)];
        assert_eq!(labels_to_reach(&c, 0.8), Some(20));
        assert_eq!(labels_to_reach(&c, 0.9), None);
        assert_eq!(f1_at(&c, 25), 0.85);
        assert_eq!(f1_at(&c, 5), 0.0);
    }
}
