use proptest::prelude::*;
use tabaudit::featurizer::{
    build_ngram_vocab, metadata_vector, ColumnStats, ErrorProbabilityBlock, FeatureConfig, FeatureSpace, TextFeatures,
};
use tabaudit::{CellRef, Table};

/// Independent TF-IDF: counts substrings by brute force over every
/// distinct gram seen anywhere in the column.
fn brute_tfidf(column: &[String], n: usize, cell: &str) -> Vec<(String, f64)> {
    let grams_of = |s: &str| -> Vec<String> {
        let cs: Vec<char> = s.chars().collect();
        if cs.len() < n {
            return vec![];
        }
        (0..=cs.len() - n).map(|i| cs[i..i + n].iter().collect()).collect()
    };
    let mut vocab: Vec<String> = column.iter().flat_map(|c| grams_of(c)).collect();
    vocab.sort();
    vocab.dedup();
    let n_docs = column.len() as f64;
    let cell_grams = grams_of(cell);
    let mut raw: Vec<(String, f64)> = vocab
        .iter()
        .map(|g| {
            let tf = cell_grams.iter().filter(|x| *x == g).count() as f64;
            let df = column.iter().filter(|c| grams_of(c).contains(g)).count() as f64;
            (g.clone(), tf * (((1.0 + n_docs) / (1.0 + df)).ln() + 1.0))
        })
        .collect();
    let norm: f64 = raw.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, v) in &mut raw {
            *v /= norm;
        }
    }
    raw
}

fn small_table() -> impl Strategy<Value = Table> {
    (1usize..=10, 1usize..=3).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(proptest::collection::vec("[abc$]{0,6}", cols), rows).prop_map(move |data| {
            Table::new(Table::synthetic_schema(cols), data).expect("rectangular")
        })
    })
}

fn plain_config() -> FeatureConfig {
    FeatureConfig {
        embedding_dim: 0,
        ..FeatureConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tfidf_matches_brute_force(table in small_table(), n in 1usize..=3) {
        for col in 0..table.n_cols() {
            let column: Vec<String> = table.column(col).map(str::to_owned).collect();
            let vocab = build_ngram_vocab(&table, col, n);
            for cell in &column {
                let fast = tabaudit::featurizer::tfidf_vector(cell, &vocab);
                let slow = brute_tfidf(&column, n, cell);
                prop_assert_eq!(fast.len(), slow.len());
                for (i, (g, v)) in slow.iter().enumerate() {
                    prop_assert_eq!(&vocab.grams[i], g);
                    prop_assert!((fast[i] - v).abs() <= 1e-12, "gram {} fast {} slow {}", g, fast[i], v);
                }
            }
        }
    }

    #[test]
    fn registry_names_round_trip(table in small_table(), errcorr in any::<bool>(), metadata in any::<bool>()) {
        let config = FeatureConfig { error_correlation: errcorr, metadata, ..plain_config() };
        let space = FeatureSpace::build(&table, &config, None).unwrap();
        for col in 0..table.n_cols() {
            let reg = space.registry(col);
            prop_assert_eq!(reg.len(), space.len_for(col));
            for i in 0..reg.len() {
                prop_assert_eq!(reg.index_of(reg.name(i)), Some(i));
            }
        }
    }

    #[test]
    fn error_correlation_block_has_m_minus_one_entries_in_unit_range(
        table in small_table(),
        probs in proptest::collection::vec(0.0f64..=1.0, 30),
    ) {
        let space = FeatureSpace::build(&table, &plain_config(), None).unwrap();
        let (n, m) = (table.n_rows(), table.n_cols());
        let mut block = ErrorProbabilityBlock::new(n, m);
        for col in 0..m {
            let p: Vec<f64> = (0..n).map(|r| probs[(r * m + col) % probs.len()]).collect();
            block.refresh(col, &p).unwrap();
        }
        for col in 0..m {
            let v = space.cell_vector(CellRef::new(0, col), &block);
            let errcorr: Vec<_> = v.blocks.iter().filter(|b| b.kind == tabaudit::featurizer::BlockKind::ErrorCorrelation).collect();
            prop_assert_eq!(errcorr.len(), 1);
            prop_assert_eq!(errcorr[0].len, m - 1);
            for x in &v.values[errcorr[0].offset..errcorr[0].offset + errcorr[0].len] {
                prop_assert!((0.0..=1.0).contains(x));
            }
        }
    }

    #[test]
    fn equal_values_share_ngram_and_metadata_blocks(table in small_table()) {
        let config = FeatureConfig { error_correlation: false, ..plain_config() };
        let space = FeatureSpace::build(&table, &config, None).unwrap();
        let block = ErrorProbabilityBlock::new(table.n_rows(), table.n_cols());
        for col in 0..table.n_cols() {
            let stats = ColumnStats::build(&table, col);
            for a in 0..table.n_rows() {
                for b in 0..table.n_rows() {
                    if table.get(a, col) != table.get(b, col) {
                        continue;
                    }
                    prop_assert_eq!(metadata_vector(table.get(a, col), &stats), metadata_vector(table.get(b, col), &stats));
                    let va = space.cell_vector(CellRef::new(a, col), &block);
                    let vb = space.cell_vector(CellRef::new(b, col), &block);
                    for i in own_features(&space, &table, col) {
                        prop_assert_eq!(va.values[i], vb.values[i]);
                    }
                }
            }
        }
    }

    #[test]
    fn layout_depends_only_on_vocabulary_and_config(table in small_table()) {
        // Appending a row whose grams are already known leaves the layout alone.
        let config = FeatureConfig { error_correlation: true, ..plain_config() };
        let before = FeatureSpace::build(&table, &config, None).unwrap();
        let mut rows: Vec<Vec<String>> = table.rows().map(|r| r.to_vec()).collect();
        let donor = rows[0].clone();
        rows.push(donor);
        let grown = Table::new(table.schema().to_vec(), rows).unwrap();
        let after = FeatureSpace::build(&grown, &config, None).unwrap();
        for col in 0..table.n_cols() {
            let (b, a) = (before.registry(col), after.registry(col));
            prop_assert_eq!(b.names(), a.names());
        }
    }
}

/// Indices of the n-gram and metadata features describing column `col`.
fn own_features(space: &FeatureSpace, table: &Table, col: usize) -> Vec<usize> {
    let reg = space.registry(col);
    let prefix = format!("col={}|", table.column_name(col));
    (0..reg.len()).filter(|&i| reg.name(i).starts_with(&prefix)).collect()
}

#[test]
fn word_mode_splits_on_whitespace() {
    let t = Table::new(vec!["a".into()], vec![vec!["new york".into()], vec!["york".into()]]).unwrap();
    let config = FeatureConfig {
        text: TextFeatures::Words,
        metadata: false,
        error_correlation: false,
        ..plain_config()
    };
    let space = FeatureSpace::build(&t, &config, None).unwrap();
    assert_eq!(space.shared_len(), 2);
}

#[test]
fn embedding_required_when_enabled() {
    let t = Table::new(vec!["a".into()], vec![vec!["x".into()]]).unwrap();
    assert!(FeatureSpace::build(&t, &FeatureConfig::default(), None).is_err());
}
