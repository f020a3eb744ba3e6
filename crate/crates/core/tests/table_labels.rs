use proptest::prelude::*;
use tabaudit::{attach_ground_truth, CellRef, Label, LabelSource, LabelStore, LabelValue, Table};

fn any_table() -> impl Strategy<Value = Table> {
    (1usize..=8, 1usize..=4).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(proptest::collection::vec("[a-z0-9 ,\"$:\\n]{0,8}", cols), rows)
            .prop_map(move |data| Table::new(Table::synthetic_schema(cols), data).expect("rectangular"))
    })
}

proptest! {
    #[test]
    fn csv_round_trip_is_lossless(table in any_table()) {
        let text = table.to_csv_string();
        let back = Table::from_csv_str(&text, true).unwrap();
        prop_assert_eq!(&back, &table);
        prop_assert_eq!(back.to_csv_string(), text);
    }

    #[test]
    fn label_counts_follow_the_set(ops in proptest::collection::vec((0usize..6, 0usize..3, any::<bool>(), any::<bool>()), 1..60)) {
        let mut store = LabelStore::new(6, 3);
        for (row, col, erroneous, retract) in ops {
            let cell = CellRef::new(row, col);
            if retract {
                store.retract(cell);
            } else {
                let l = Label::new(cell, LabelValue::from_bool(erroneous), LabelSource::Human, 0);
                let before = store.get(cell).copied();
                let rejected = store.submit(&[l]).unwrap();
                prop_assert_eq!(rejected.is_empty(), before.is_none());
                if let Some(b) = before {
                    prop_assert_eq!(store.get(cell), Some(&b));
                }
            }
            for c in 0..3 {
                let labels = store.column(c);
                let e = labels.iter().filter(|l| l.label.is_error()).count();
                prop_assert_eq!(store.counts(c).erroneous, e);
                prop_assert_eq!(store.counts(c).correct, labels.len() - e);
            }
        }
    }
}

#[test]
fn out_of_bounds_batch_records_nothing() {
    let mut store = LabelStore::new(2, 2);
    let ok = Label::new(CellRef::new(0, 0), LabelValue::Correct, LabelSource::Human, 0);
    let bad = Label::new(CellRef::new(5, 0), LabelValue::Correct, LabelSource::Human, 0);
    assert!(matches!(store.submit(&[ok, bad]), Err(tabaudit::Error::OutOfBounds { row: 5, col: 0 })));
    assert!(store.is_empty());
}

#[test]
fn ground_truth_schema_must_match_by_name_and_position() {
    let dirty = Table::new(vec!["a".into(), "b".into()], vec![vec!["1".into(), "2".into()]]).unwrap();
    let swapped = Table::new(vec!["b".into(), "a".into()], vec![vec!["2".into(), "1".into()]]).unwrap();
    assert!(attach_ground_truth(&dirty, swapped).is_err());
    let short = Table::new(vec!["a".into(), "b".into()], vec![]);
    if let Ok(short) = short {
        assert!(attach_ground_truth(&dirty, short).is_err());
    }
    let same = dirty.clone();
    assert!(attach_ground_truth(&dirty, same).is_ok());
}

#[test]
fn ragged_csv_is_rejected() {
    assert!(Table::from_csv_str("a,b\n1,2\n3\n", true).is_err());
}
