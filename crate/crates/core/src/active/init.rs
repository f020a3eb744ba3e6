//! Frequency-ranked initialization probes.

use std::collections::{HashMap, HashSet};

use super::config::INIT_PER_CLASS;
use crate::labels::LabelStore;
use crate::table::{CellRef, Table};

/// Distinct values of a column in probe order: rarest, most frequent,
/// second rarest, second most frequent, and so on. Count ties are broken by
/// first occurrence.
pub fn probe_order(table: &Table, col: usize) -> Vec<String> {
    let mut stats: HashMap<&str, (usize, usize)> = HashMap::new();
    for (row, v) in table.column(col).enumerate() {
        stats.entry(v).or_insert((0, row)).0 += 1;
    }
    let mut rare: Vec<(&str, usize, usize)> = stats.into_iter().map(|(v, (c, f))| (v, c, f)).collect();
    rare.sort_by_key(|&(_, c, f)| (c, f));
    let mut frequent = rare.clone();
    frequent.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));

    let mut seen = HashSet::new();
    let mut order = Vec::with_capacity(rare.len());
    let (mut i, mut j) = (0, 0);
    let mut from_rare = true;
    while order.len() < rare.len() {
        let list = if from_rare { &rare } else { &frequent };
        let cursor = if from_rare { &mut i } else { &mut j };
        while *cursor < list.len() {
            let v = list[*cursor].0;
            *cursor += 1;
            if seen.insert(v) {
                order.push(v.to_string());
                break;
            }
        }
        from_rare = !from_rare;
    }
    order
}

/// Labels still missing before `col` has [`INIT_PER_CLASS`] of each class.
pub fn deficit(store: &LabelStore, col: usize) -> usize {
    let c = store.counts(col);
    INIT_PER_CLASS.saturating_sub(c.erroneous) + INIT_PER_CLASS.saturating_sub(c.correct)
}

/// The next initialization cells for `col`: one representative (first
/// unlabeled occurrence) per unprobed value in `order`, at most as many as
/// the class deficit, the remaining probe cap and `budget_left` allow.
/// Empty means the column's initialization is over.
pub fn next_probes(
    table: &Table,
    col: usize,
    order: &[String],
    store: &LabelStore,
    cap: usize,
    budget_left: usize,
) -> Vec<CellRef> {
    let labeled = store.column(col);
    let want = deficit(store, col)
        .min(cap.saturating_sub(labeled.len()))
        .min(budget_left);
    if want == 0 {
        return Vec::new();
    }
    let probed: HashSet<&str> = labeled.iter().map(|l| table.get(l.row, col)).collect();
    let mut first: HashMap<&str, usize> = HashMap::new();
    for (row, v) in table.column(col).enumerate() {
        if !store.contains(CellRef::new(row, col)) {
            first.entry(v).or_insert(row);
        }
    }
    order
        .iter()
        .filter(|v| !probed.contains(v.as_str()))
        .filter_map(|v| first.get(v.as_str()).map(|&row| CellRef::new(row, col)))
        .take(want)
        .collect()
}

/// Whether initialization of `col` can make no further progress.
pub fn is_complete(table: &Table, col: usize, order: &[String], store: &LabelStore, cap: usize) -> bool {
    next_probes(table, col, order, store, cap, usize::MAX).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::{Label, LabelSource, LabelValue};

    fn table(values: &[&str]) -> Table {
        Table::new(vec!["v".into()], values.iter().map(|v| vec![v.to_string()]).collect()).unwrap()
    }

    #[test]
    fn alternates_rare_and_frequent() {
        let t = table(&["a", "b", "b", "c", "c", "c", "d"]);
        assert_eq!(probe_order(&t, 0), ["a", "c", "d", "b"]);
    }

    #[test]
    fn count_ties_follow_first_occurrence() {
        let t = table(&["y", "x", "x", "y", "z"]);
        assert_eq!(probe_order(&t, 0), ["z", "y", "x"]);
    }

    #[test]
    fn rare_error_found_within_two_probes() {
        let mut values = vec!["ok"; 99];
        values.insert(37, "err");
        let t = table(&values);
        let order = probe_order(&t, 0);
        let store = LabelStore::new(t.n_rows(), 1);
        let probes = next_probes(&t, 0, &order, &store, 20, 100);
        assert_eq!(probes, [CellRef::new(37, 0), CellRef::new(0, 0)]);
    }

    #[test]
    fn stops_at_cap_or_when_values_run_out() {
        let t = table(&["a", "a", "b"]);
        let order = probe_order(&t, 0);
        let mut store = LabelStore::new(3, 1);
        let p = next_probes(&t, 0, &order, &store, 20, 100);
        assert_eq!(p.len(), 2);
        let labels: Vec<Label> =
            p.iter().map(|&c| Label::new(c, LabelValue::Correct, LabelSource::Oracle, 0)).collect();
        store.submit(&labels).unwrap();
        assert!(is_complete(&t, 0, &order, &store, 20));
        assert!(next_probes(&t, 0, &order, &LabelStore::new(3, 1), 1, 100).len() == 1);
    }
}
