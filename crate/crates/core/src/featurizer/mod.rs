//! Cell featurization.
//!
//! A cell's vector is `[ngrams of every column, metadata of every column,
//! embeddings of every column, error probabilities of every other column]`.
//! The first three blocks depend only on the row, so they are computed once
//! per row and shared by all column classifiers. The last block is read
//! from the mutable [`ErrorProbabilityBlock`] when a matrix is materialized.

pub mod metadata;
pub mod ngram;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::Matrix;
use crate::embedding::EmbeddingModel;
use crate::error::{Error, Result};
use crate::table::{CellRef, Table};

pub use metadata::{detect_type, metadata_vector, ColumnStats, DataType, METADATA_LEN};
pub use ngram::{build_ngram_vocab, char_ngrams, tfidf_vector, NGramVocabulary, Tokenizer};

/// Which text representation feeds the n-gram block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextFeatures {
    CharNgrams { n: usize },
    Words,
    Off,
}

impl TextFeatures {
    pub fn tokenizer(self) -> Option<Tokenizer> {
        match self {
            TextFeatures::CharNgrams { n } => Some(Tokenizer::Chars { n }),
            TextFeatures::Words => Some(Tokenizer::Words),
            TextFeatures::Off => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub text: TextFeatures,
    pub metadata: bool,
    /// Embedding dimensionality; 0 disables the block.
    pub embedding_dim: usize,
    pub error_correlation: bool,
    pub vocab_cap: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            text: TextFeatures::CharNgrams { n: 1 },
            metadata: true,
            embedding_dim: 50,
            error_correlation: true,
            vocab_cap: ngram::DEFAULT_VOCAB_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Ngram,
    Metadata,
    Embedding,
    ErrorCorrelation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    pub offset: usize,
    pub len: usize,
}

/// One cell's full feature vector with its block layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFeatureVector {
    pub blocks: Vec<Block>,
    pub values: Vec<f64>,
}

/// Maps feature indices to human-readable names and back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRegistry {
    names: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl FeatureRegistry {
    pub fn new(names: Vec<String>) -> Self {
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        Self { names, index }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.names).expect("names serialize")
    }
}

/// Current estimated error probability of every cell, per column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorProbabilityBlock {
    n_rows: usize,
    #[serde(with = "crate::serde_f64::nested")]
    probs: Vec<Vec<f64>>,
    initialized: Vec<bool>,
}

/// Probability assumed for columns that have no model yet.
pub const UNINITIALIZED_PROBABILITY: f64 = 0.0;

impl ErrorProbabilityBlock {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            probs: vec![vec![UNINITIALIZED_PROBABILITY; n_rows]; n_cols],
            initialized: vec![false; n_cols],
        }
    }

    pub fn n_cols(&self) -> usize {
        self.probs.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.probs[col][row]
    }

    pub fn column(&self, col: usize) -> &[f64] {
        &self.probs[col]
    }

    pub fn is_initialized(&self, col: usize) -> bool {
        self.initialized[col]
    }

    /// Replaces one column. The whole column is validated before anything
    /// is written.
    pub fn refresh(&mut self, col: usize, probabilities: &[f64]) -> Result<()> {
        if probabilities.len() != self.n_rows {
            return Err(Error::FeatureLengthMismatch {
                expected: self.n_rows,
                found: probabilities.len(),
            });
        }
        if let Some((row, &value)) = probabilities
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(Error::BadProbability { row, value });
        }
        self.probs[col] = probabilities.to_vec();
        self.initialized[col] = true;
        Ok(())
    }
}

/// Error probabilities of the other columns of `target`'s row, in
/// ascending column order.
pub fn error_correlation_vector(block: &ErrorProbabilityBlock, target: CellRef) -> Vec<f64> {
    (0..block.n_cols())
        .filter(|&k| k != target.col)
        .map(|k| block.get(target.row, k))
        .collect()
}

/// Concatenates per-column vectors, checking each against the expected
/// layout.
pub fn concat_columns(parts: &[&[f64]], expected_lens: &[usize]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(expected_lens.iter().sum());
    for (col, (part, &len)) in parts.iter().zip(expected_lens).enumerate() {
        if part.len() != len {
            return Err(Error::LengthDrift {
                col,
                expected: len,
                found: part.len(),
            });
        }
        out.extend_from_slice(part);
    }
    Ok(out)
}

/// The materialized features of one target column: one row per table row.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub column: usize,
    pub values: Matrix,
    pub registry: FeatureRegistry,
}

/// Row-shared feature blocks plus the layout needed to materialize
/// per-column matrices.
#[derive(Debug, Clone)]
pub struct FeatureSpace {
    n_rows: usize,
    n_cols: usize,
    column_names: Vec<String>,
    shared: Matrix,
    shared_names: Vec<String>,
    shared_blocks: Vec<Block>,
    error_correlation: bool,
    vocabs: Vec<NGramVocabulary>,
}

impl FeatureSpace {
    /// Builds vocabularies and statistics from `table` and assembles the
    /// shared blocks. `embedding` must be given when the config enables it.
    pub fn build(table: &Table, config: &FeatureConfig, embedding: Option<&EmbeddingModel>) -> Result<Self> {
        let m = table.n_cols();
        let vocabs: Vec<NGramVocabulary> = match config.text.tokenizer() {
            Some(tok) => (0..m)
                .map(|j| NGramVocabulary::build(table, j, tok, config.vocab_cap))
                .collect(),
            None => Vec::new(),
        };
        let stats: Vec<ColumnStats> = if config.metadata {
            (0..m).map(|j| ColumnStats::build(table, j)).collect()
        } else {
            Vec::new()
        };
        let embedding = if config.embedding_dim > 0 {
            let e = embedding.ok_or_else(|| Error::Config("embedding block enabled but no model given".into()))?;
            if e.dim() != config.embedding_dim {
                return Err(Error::Config(format!(
                    "embedding model has dim {}, config wants {}",
                    e.dim(),
                    config.embedding_dim
                )));
            }
            Some(e)
        } else {
            None
        };
        assemble(table, &vocabs, &stats, embedding, config.error_correlation)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn vocabularies(&self) -> &[NGramVocabulary] {
        &self.vocabs
    }

    pub fn shared_len(&self) -> usize {
        self.shared.cols()
    }

    pub fn error_correlation(&self) -> bool {
        self.error_correlation
    }

    fn errcorr_len(&self) -> usize {
        if self.error_correlation {
            self.n_cols - 1
        } else {
            0
        }
    }

    /// Feature vector length for any cell of `col`.
    pub fn len_for(&self, _col: usize) -> usize {
        self.shared_len() + self.errcorr_len()
    }

    pub fn blocks_for(&self, _col: usize) -> Vec<Block> {
        let mut blocks = self.shared_blocks.clone();
        if self.error_correlation {
            blocks.push(Block {
                kind: BlockKind::ErrorCorrelation,
                offset: self.shared_len(),
                len: self.errcorr_len(),
            });
        }
        blocks
    }

    pub fn registry(&self, col: usize) -> FeatureRegistry {
        let mut names = self.shared_names.clone();
        if self.error_correlation {
            names.extend(
                (0..self.n_cols)
                    .filter(|&k| k != col)
                    .map(|k| format!("errprob|col={}", self.column_names[k])),
            );
        }
        FeatureRegistry::new(names)
    }

    fn write_row(&self, col: usize, row: usize, block: &ErrorProbabilityBlock, out: &mut [f64]) {
        let s = self.shared_len();
        out[..s].copy_from_slice(self.shared.row(row));
        if self.error_correlation {
            let others = (0..self.n_cols).filter(|&k| k != col);
            for (slot, k) in out[s..].iter_mut().zip(others) {
                *slot = block.get(row, k);
            }
        }
    }

    pub fn cell_vector(&self, cell: CellRef, block: &ErrorProbabilityBlock) -> CellFeatureVector {
        let mut values = vec![0.0; self.len_for(cell.col)];
        self.write_row(cell.col, cell.row, block, &mut values);
        CellFeatureVector {
            blocks: self.blocks_for(cell.col),
            values,
        }
    }

    /// Feature rows of column `col` for the given table rows.
    pub fn rows_matrix(&self, col: usize, rows: &[usize], block: &ErrorProbabilityBlock) -> Matrix {
        let f = self.len_for(col);
        let mut m = Matrix::zeros(rows.len(), f);
        for (i, &r) in rows.iter().enumerate() {
            self.write_row(col, r, block, m.row_mut(i));
        }
        m
    }

    /// Full N-row matrix for column `col`.
    pub fn matrix(&self, col: usize, block: &ErrorProbabilityBlock) -> FeatureMatrix {
        let f = self.len_for(col);
        let mut data = vec![0.0; self.n_rows * f];
        if f > 0 {
            data.par_chunks_mut(f)
                .enumerate()
                .for_each(|(r, out)| self.write_row(col, r, block, out));
        }
        FeatureMatrix {
            column: col,
            values: Matrix::from_vec(self.n_rows, f, data),
            registry: self.registry(col),
        }
    }
}

/// Assembles the shared blocks for every row: n-grams, then metadata, then
/// embeddings, each concatenated over columns in order.
pub fn assemble(
    table: &Table,
    vocabs: &[NGramVocabulary],
    stats: &[ColumnStats],
    embedding: Option<&EmbeddingModel>,
    error_correlation: bool,
) -> Result<FeatureSpace> {
    let m = table.n_cols();
    let names_of = |j: usize| table.column_name(j);
    let mut shared_names = Vec::new();
    let mut shared_blocks = Vec::new();

    let ngram_lens: Vec<usize> = vocabs.iter().map(NGramVocabulary::len).collect();
    let ngram_len: usize = ngram_lens.iter().sum();
    if !vocabs.is_empty() {
        for v in vocabs {
            let label = v.tokenizer.label();
            shared_names.extend(v.grams.iter().map(|g| format!("col={}|{label}={g}", names_of(v.column))));
        }
        shared_blocks.push(Block {
            kind: BlockKind::Ngram,
            offset: 0,
            len: ngram_len,
        });
    }
    let meta_len = stats.len() * METADATA_LEN;
    if !stats.is_empty() {
        for j in 0..stats.len() {
            shared_names.extend(metadata::METADATA_NAMES.iter().map(|n| format!("col={}|meta={n}", names_of(j))));
        }
        shared_blocks.push(Block {
            kind: BlockKind::Metadata,
            offset: ngram_len,
            len: meta_len,
        });
    }
    let dim = embedding.map_or(0, EmbeddingModel::dim);
    let emb_len = if embedding.is_some() { dim * m } else { 0 };
    if embedding.is_some() {
        for j in 0..m {
            shared_names.extend((0..dim).map(|d| format!("col={}|emb={d}", names_of(j))));
        }
        shared_blocks.push(Block {
            kind: BlockKind::Embedding,
            offset: ngram_len + meta_len,
            len: emb_len,
        });
    }
    let width = ngram_len + meta_len + emb_len;
    let meta_lens = vec![METADATA_LEN; stats.len()];
    let emb_lens = vec![dim; if embedding.is_some() { m } else { 0 }];

    let rows: Vec<Result<Vec<f64>>> = (0..table.n_rows())
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::with_capacity(width);
            let grams: Vec<Vec<f64>> = vocabs.iter().map(|v| tfidf_vector(table.get(i, v.column), v)).collect();
            let refs: Vec<&[f64]> = grams.iter().map(Vec::as_slice).collect();
            out.extend(concat_columns(&refs, &ngram_lens)?);
            let metas: Vec<[f64; METADATA_LEN]> =
                stats.iter().enumerate().map(|(j, s)| metadata_vector(table.get(i, j), s)).collect();
            let refs: Vec<&[f64]> = metas.iter().map(|a| a.as_slice()).collect();
            out.extend(concat_columns(&refs, &meta_lens)?);
            if let Some(e) = embedding {
                let vecs: Vec<Vec<f64>> = (0..m).map(|j| e.embed(CellRef::new(i, j), table)).collect::<Result<_>>()?;
                let refs: Vec<&[f64]> = vecs.iter().map(Vec::as_slice).collect();
                out.extend(concat_columns(&refs, &emb_lens)?);
            }
            Ok(out)
        })
        .collect();
    let mut data = Vec::with_capacity(table.n_rows() * width);
    for r in rows {
        data.extend(r?);
    }
    Ok(FeatureSpace {
        n_rows: table.n_rows(),
        n_cols: m,
        column_names: table.schema().to_vec(),
        shared: Matrix::from_vec(table.n_rows(), width, data),
        shared_names,
        shared_blocks,
        error_correlation,
        vocabs: vocabs.to_vec(),
    })
}
