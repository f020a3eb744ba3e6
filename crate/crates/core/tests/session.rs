use std::collections::HashSet;
use std::sync::Arc;

use tabaudit::active::{ColumnMetrics, SelectorState, Session, SessionSnapshot, Stage};
use tabaudit::evaluation::inject_errors;
use tabaudit::evaluation::synth::{employees, employees_plan};
use tabaudit::{CellRef, GroundTruth, LabelSource, LabelValue, SessionConfig, Strategy, Table};

fn fixture(rows: usize, seed: u64) -> (Arc<Table>, Arc<GroundTruth>) {
    let (dirty, truth) = inject_errors(&employees(rows, seed), &employees_plan(seed)).unwrap();
    (Arc::new(dirty), Arc::new(truth))
}

fn config(budget: usize, strategy: Strategy, seed: u64) -> SessionConfig {
    let mut c = SessionConfig::new(budget, strategy, seed);
    c.features.embedding_dim = 8;
    c.n_trees = 9;
    c
}

fn answer(s: &Session, truth: &GroundTruth) -> Vec<(CellRef, LabelValue)> {
    s.pending_batch()
        .expect("pending batch")
        .cell_refs()
        .into_iter()
        .map(|c| (c, LabelValue::from_bool(truth.is_error(s.table(), c))))
        .collect()
}

/// Drives a session to the end, returning every batch as (column, rows).
fn drive(s: &mut Session, truth: &GroundTruth) -> Vec<(usize, Vec<usize>)> {
    let mut batches = Vec::new();
    while let Some(p) = s.pending().cloned() {
        batches.push((p.column, p.rows.clone()));
        let a = answer(s, truth);
        s.submit(&a, LabelSource::Oracle).unwrap();
    }
    batches
}

#[test]
fn no_cell_is_asked_twice_and_budget_is_exact() {
    let (table, truth) = fixture(250, 1);
    for strategy in Strategy::ALL {
        let mut s = Session::new(table.clone(), Some(truth.clone()), config(90, strategy, 4)).unwrap();
        let batches = drive(&mut s, &truth);
        let mut seen = HashSet::new();
        let mut total = 0;
        for (col, rows) in &batches {
            assert!(rows.len() <= 10 || s.history().is_empty());
            for &r in rows {
                assert!(seen.insert(CellRef::new(r, *col)), "{strategy}: cell ({r},{col}) asked twice");
            }
            total += rows.len();
        }
        assert!(s.is_finished());
        assert_eq!(total, s.labels_used());
        assert_eq!(total, s.labels().len());
        assert!(total <= 90);
        let active: usize = s.history().windows(2).map(|w| w[1].labels_used - w[0].labels_used).sum();
        let init = s.history()[0].labels_used;
        assert_eq!(init + active, total, "{strategy}: init {init} + active {active}");
    }
}

#[test]
fn identical_runs_give_identical_batches_and_predictions() {
    let (table, truth) = fixture(200, 2);
    let run = || {
        let mut s = Session::new(table.clone(), Some(truth.clone()), config(80, Strategy::MinCertainty, 11)).unwrap();
        let b = drive(&mut s, &truth);
        (b, s.final_predictions(), s.snapshot().to_json())
    };
    let (b1, p1, j1) = run();
    let (b2, p2, j2) = run();
    assert_eq!(b1, b2);
    assert_eq!(p1, p2);
    assert_eq!(j1, j2);
}

#[test]
fn restoring_mid_run_replays_the_same_batches() {
    let (table, truth) = fixture(200, 3);
    let cfg = config(100, Strategy::MinCertainty, 5);
    let mut full = Session::new(table.clone(), Some(truth.clone()), cfg.clone()).unwrap();
    let expected = drive(&mut full, &truth);

    for stop in [2usize, 9, 12] {
        let mut s = Session::new(table.clone(), Some(truth.clone()), cfg.clone()).unwrap();
        let mut seen = Vec::new();
        for _ in 0..stop {
            let p = s.pending().cloned().unwrap();
            seen.push((p.column, p.rows));
            let a = answer(&s, &truth);
            s.submit(&a, LabelSource::Oracle).unwrap();
        }
        let json = s.snapshot().to_json();
        drop(s);
        let snap = SessionSnapshot::from_json(&json).unwrap();
        let mut resumed = Session::restore(table.clone(), Some(truth.clone()), snap).unwrap();
        seen.extend(drive(&mut resumed, &truth));
        assert_eq!(seen, expected, "diverged after restoring at batch {stop}");
        assert_eq!(resumed.final_predictions(), full.final_predictions());
    }
}

#[test]
fn snapshot_refuses_a_different_table() {
    let (table, truth) = fixture(120, 4);
    let s = Session::new(table, Some(truth), config(60, Strategy::RoundRobin, 0)).unwrap();
    let (other, _) = fixture(120, 5);
    assert!(Session::restore(other, None, s.snapshot()).is_err());
}

#[test]
fn mismatched_or_repeated_submissions_are_rejected() {
    let (table, truth) = fixture(120, 6);
    let mut s = Session::new(table, Some(truth.clone()), config(60, Strategy::RoundRobin, 0)).unwrap();
    let good = answer(&s, &truth);
    let mut wrong = good.clone();
    wrong[0].0 = CellRef::new(wrong[0].0.row, (wrong[0].0.col + 1) % 8);
    assert!(matches!(s.submit(&wrong, LabelSource::Human), Err(tabaudit::Error::LabelMismatch(_))));
    assert!(matches!(s.submit(&good[1..], LabelSource::Human), Err(tabaudit::Error::LabelMismatch(_))));
    let before = s.labels_used();
    s.submit(&good, LabelSource::Human).unwrap();
    assert_eq!(s.labels_used(), before + good.len());
    assert!(s.submit(&good, LabelSource::Human).is_err());
}

#[test]
fn budget_below_initialization_cost_is_refused() {
    let (table, truth) = fixture(50, 7);
    let err = Session::new(table, Some(truth), config(31, Strategy::MinCertainty, 0)).unwrap_err();
    assert!(matches!(err, tabaudit::Error::BudgetExhausted(_)));
}

#[test]
fn clean_column_becomes_degenerate() {
    let rows: Vec<Vec<String>> = (0..60).map(|i| vec![format!("v{}", i % 5), format!("w{}", i % 7)]).collect();
    let clean = Table::new(vec!["a".into(), "b".into()], rows.clone()).unwrap();
    let mut dirty_rows = rows;
    for r in [3, 17, 40] {
        dirty_rows[r][1] = "zzz".into();
    }
    let dirty = Table::new(clean.schema().to_vec(), dirty_rows).unwrap();
    let truth = Arc::new(tabaudit::attach_ground_truth(&dirty, clean).unwrap());
    let mut s = Session::new(Arc::new(dirty), Some(truth.clone()), config(60, Strategy::MinCertainty, 0)).unwrap();
    drive(&mut s, &truth);
    assert!(s.is_degenerate(0));
    assert!(!s.is_degenerate(1));
    let model = s.model(0).unwrap();
    assert!(model.committee.is_constant());
    assert!(model.probabilities.iter().all(|&p| (p - 0.01).abs() < 1e-12));
    assert!(s.labels().counts(0).total() <= 20);
}

#[test]
fn round_robin_visits_every_column_once_per_cycle() {
    let mut sel = SelectorState::new(Strategy::RoundRobin, 0);
    let selectable = [true, false, true, true, true];
    let m = ColumnMetrics { mean_certainty: 0.7, cv_f1: 0.5, prediction_change: 0.1 };
    let metrics = [m; 5];
    for cycle in 0..3 {
        let picks: Vec<usize> = (0..4).map(|i| sel.select(&metrics, &selectable, cycle * 4 + i).unwrap()).collect();
        assert_eq!(picks, vec![0, 2, 3, 4]);
    }
}

#[test]
fn min_certainty_ignores_positive_rescaling() {
    let mut rng = tabaudit::seed::rng(99, &[]);
    use rand::Rng;
    for _ in 0..200 {
        let n = rng.random_range(1..8);
        let metrics: Vec<ColumnMetrics> = (0..n)
            .map(|_| ColumnMetrics {
                mean_certainty: rng.random_range(0.5..1.0),
                cv_f1: rng.random_range(0.0..1.0),
                prediction_change: rng.random_range(0.0..1.0),
            })
            .collect();
        let selectable: Vec<bool> = (0..n).map(|_| rng.random_bool(0.8)).collect();
        if !selectable.iter().any(|&s| s) {
            continue;
        }
        let k: f64 = rng.random_range(0.01..100.0);
        let scaled: Vec<ColumnMetrics> =
            metrics.iter().map(|m| ColumnMetrics { mean_certainty: m.mean_certainty * k, ..*m }).collect();
        let a = SelectorState::new(Strategy::MinCertainty, 0).select(&metrics, &selectable, 0).unwrap();
        let b = SelectorState::new(Strategy::MinCertainty, 0).select(&scaled, &selectable, 0).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn stage_moves_from_initialization_to_finished() {
    let (table, truth) = fixture(100, 8);
    let mut s = Session::new(table, Some(truth.clone()), config(50, Strategy::MaxError, 1)).unwrap();
    assert!(matches!(s.stage(), Stage::Initializing { column: 0 }));
    let b = s.pending_batch().unwrap();
    assert_eq!(b.iteration, 0);
    assert!(b.cells.iter().all(|c| c.disagreement.is_none()));
    drive(&mut s, &truth);
    assert_eq!(s.stage(), Stage::Finished);
    assert!(s.pending_batch().is_none());
    assert!(s.score().unwrap().is_some());
}
