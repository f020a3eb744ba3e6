//! Bag-of-n-grams text features with TF-IDF weighting.
//!
//! tf is the raw occurrence count of a gram in the cell, idf is the smoothed
//! `ln((1 + N) / (1 + df)) + 1` over the cell's column, and each cell vector
//! is L2-normalized (the zero vector stays zero).

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::table::Table;

/// Default per-column vocabulary cap.
pub const DEFAULT_VOCAB_CAP: usize = 2000;

/// How a cell string is split into terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tokenizer {
    /// Character n-grams of a fixed order.
    Chars { n: usize },
    /// Whitespace-separated words.
    Words,
}

impl Tokenizer {
    pub fn terms(&self, cell: &str) -> Vec<String> {
        match *self {
            Tokenizer::Chars { n } => char_ngrams(cell, n),
            Tokenizer::Words => cell.split_whitespace().map(str::to_owned).collect(),
        }
    }

    /// Short label used in feature names.
    pub fn label(&self) -> String {
        match *self {
            Tokenizer::Chars { n: 1 } => "unigram".into(),
            Tokenizer::Chars { n: 2 } => "bigram".into(),
            Tokenizer::Chars { n: 3 } => "trigram".into(),
            Tokenizer::Chars { n } => format!("{n}gram"),
            Tokenizer::Words => "word".into(),
        }
    }
}

/// All character n-grams of `text`, in order of occurrence. Strings shorter
/// than `n` have none.
pub fn char_ngrams(text: &str, n: usize) -> Vec<String> {
    assert!(n >= 1, "gram order must be at least 1");
    let chars: Vec<char> = text.chars().collect();
    if chars.len() < n {
        return Vec::new();
    }
    chars.windows(n).map(|w| w.iter().collect()).collect()
}

/// The distinct terms of one column with their document frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NGramVocabulary {
    pub column: usize,
    pub tokenizer: Tokenizer,
    /// Sorted lexicographically.
    pub grams: Vec<String>,
    /// Number of cells in the column containing each gram.
    pub df: Vec<usize>,
    pub n_rows: usize,
    /// True when the cap dropped some grams.
    pub truncated: bool,
}

impl NGramVocabulary {
    pub fn build(table: &Table, col: usize, tokenizer: Tokenizer, cap: usize) -> Self {
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for cell in table.column(col) {
            let mut terms = tokenizer.terms(cell);
            terms.sort_unstable();
            terms.dedup();
            for t in terms {
                *df.entry(t).or_insert(0) += 1;
            }
        }
        let mut entries: Vec<(String, usize)> = df.into_iter().collect();
        let truncated = entries.len() > cap;
        if truncated {
            // keep the most frequent, lexicographic order among ties
            entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            entries.truncate(cap);
            entries.sort_by(|a, b| a.0.cmp(&b.0));
        }
        let (grams, df) = entries.into_iter().unzip();
        Self {
            column: col,
            tokenizer,
            grams,
            df,
            n_rows: table.n_rows(),
            truncated,
        }
    }

    pub fn len(&self) -> usize {
        self.grams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grams.is_empty()
    }

    pub fn idf(&self, g: usize) -> f64 {
        ((1.0 + self.n_rows as f64) / (1.0 + self.df[g] as f64)).ln() + 1.0
    }

    pub fn position(&self, gram: &str) -> Option<usize> {
        self.grams.binary_search_by(|g| g.as_str().cmp(gram)).ok()
    }
}

/// Character n-gram vocabulary for one column with the default cap.
pub fn build_ngram_vocab(table: &Table, col: usize, n: usize) -> NGramVocabulary {
    NGramVocabulary::build(table, col, Tokenizer::Chars { n }, DEFAULT_VOCAB_CAP)
}

/// Dense TF-IDF vector of `cell` over `vocab`.
pub fn tfidf_vector(cell: &str, vocab: &NGramVocabulary) -> Vec<f64> {
    let mut counts: HashMap<usize, f64> = HashMap::new();
    for term in vocab.tokenizer.terms(cell) {
        if let Some(g) = vocab.position(&term) {
            *counts.entry(g).or_insert(0.0) += 1.0;
        }
    }
    let mut out = vec![0.0; vocab.len()];
    for (g, tf) in counts {
        out[g] = tf * vocab.idf(g);
    }
    let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        out.iter_mut().for_each(|v| *v /= norm);
    }
    out
}
