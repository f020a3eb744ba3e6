//! Cell-value embeddings learned with skip-gram and negative sampling.
//!
//! Each tuple is a document and each `(column, value)` pair a word. The
//! context of a token is the whole tuple, so every ordered pair of cells in
//! a row is one training example. Training is single-threaded and fully
//! determined by the seed.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::table::{CellRef, Table};

pub const EMBEDDING_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub dim: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f32,
    pub seed: u64,
}

impl EmbeddingConfig {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self {
            dim,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            seed,
        }
    }
}

/// Token string for a cell value: `"{col}={value}"`.
pub fn token(col: usize, value: &str) -> String {
    format!("{col}={value}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingModel {
    format_version: u32,
    dim: usize,
    epochs: usize,
    seed: u64,
    tokens: Vec<String>,
    vectors: Vec<f32>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl EmbeddingModel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn vector(&self, token: &str) -> Option<&[f32]> {
        let i = *self.index.get(token)?;
        Some(&self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    /// Embedding of a table cell.
    pub fn embed(&self, cell: CellRef, table: &Table) -> Result<Vec<f64>> {
        let tok = token(cell.col, table.try_get(cell)?);
        self.vector(&tok)
            .map(|v| v.iter().map(|&x| f64::from(x)).collect())
            .ok_or(Error::UnknownToken(tok))
    }

    pub fn cosine(&self, a: &str, b: &str) -> Option<f64> {
        let (a, b) = (self.vector(a)?, self.vector(b)?);
        let dot: f64 = a.iter().zip(b).map(|(x, y)| f64::from(*x) * f64::from(*y)).sum();
        let na: f64 = a.iter().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            return Some(0.0);
        }
        Some(dot / (na * nb))
    }

    fn reindex(&mut self) {
        self.index = self.tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("embedding serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut m: EmbeddingModel = serde_json::from_str(text).map_err(|e| Error::Decode(e.to_string()))?;
        if m.format_version != EMBEDDING_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: m.format_version,
                expected: EMBEDDING_FORMAT_VERSION,
            });
        }
        if m.vectors.len() != m.tokens.len() * m.dim {
            return Err(Error::Decode("vector data does not match token count".into()));
        }
        m.reindex();
        Ok(m)
    }
}

fn sigmoid(x: f32) -> f32 {
    if x > 8.0 {
        1.0
    } else if x < -8.0 {
        0.0
    } else {
        1.0 / (1.0 + (-x).exp())
    }
}

/// Alias-free negative sampler over the unigram^0.75 distribution.
struct NegativeTable {
    cumulative: Vec<f64>,
}

impl NegativeTable {
    fn new(counts: &[usize]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let x = rng.random::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= x).min(self.cumulative.len() - 1)
    }
}

/// Trains embeddings over the rows of `table`. The returned vector of a
/// token is the sum of its input and output weights, which places values
/// that co-occur in a tuple close to each other.
pub fn train_embedding(table: &Table, config: &EmbeddingConfig) -> EmbeddingModel {
    assert!(config.dim >= 1, "embedding dimension must be at least 1");
    let m = table.n_cols();
    let mut vocab: BTreeMap<String, usize> = BTreeMap::new();
    for row in table.rows() {
        for (j, v) in row.iter().enumerate() {
            *vocab.entry(token(j, v)).or_insert(0) += 1;
        }
    }
    let tokens: Vec<String> = vocab.keys().cloned().collect();
    let counts: Vec<usize> = vocab.values().copied().collect();
    let index: HashMap<String, usize> = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    let docs: Vec<Vec<usize>> = table
        .rows()
        .map(|row| row.iter().enumerate().map(|(j, v)| index[&token(j, v)]).collect())
        .collect();

    let dim = config.dim;
    let mut rng = seed::rng(config.seed, &[seed::EMBEDDING]);
    let bound = 0.5 / dim as f32;
    let mut input: Vec<f32> = (0..tokens.len() * dim)
        .map(|_| rng.random_range(-bound..bound))
        .collect();
    let mut output = vec![0.0f32; tokens.len() * dim];
    let negatives = NegativeTable::new(&counts);

    let pairs_per_epoch = docs.len() * m * m.saturating_sub(1);
    let total = (pairs_per_epoch * config.epochs).max(1) as f32;
    let min_lr = config.learning_rate * 1e-4;
    let mut step = 0usize;
    let mut grad = vec![0.0f32; dim];

    for _ in 0..config.epochs {
        for doc in &docs {
            for (a, &center) in doc.iter().enumerate() {
                for (b, &context) in doc.iter().enumerate() {
                    if a == b {
                        continue;
                    }
                    let lr = (config.learning_rate * (1.0 - step as f32 / total)).max(min_lr);
                    step += 1;
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    let inp = center * dim;
                    for k in 0..=config.negatives {
                        let (target, label) = if k == 0 {
                            (context, 1.0)
                        } else {
                            let t = negatives.sample(&mut rng);
                            if t == context {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let out = target * dim;
                        let dot: f32 = (0..dim).map(|d| input[inp + d] * output[out + d]).sum();
                        let g = (label - sigmoid(dot)) * lr;
                        for d in 0..dim {
                            grad[d] += g * output[out + d];
                            output[out + d] += g * input[inp + d];
                        }
                    }
                    for d in 0..dim {
                        input[inp + d] += grad[d];
                    }
                }
            }
        }
    }

    let vectors = input.iter().zip(&output).map(|(a, b)| a + b).collect();
    let mut model = EmbeddingModel {
        format_version: EMBEDDING_FORMAT_VERSION,
        dim,
        epochs: config.epochs,
        seed: config.seed,
        tokens,
        vectors,
        index: HashMap::new(),
    };
    model.reindex();
    model
}
