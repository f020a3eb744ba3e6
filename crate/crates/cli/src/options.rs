use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use tabaudit::featurizer::TextFeatures;
use tabaudit::{SessionConfig, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextMode {
    /// Character n-grams of order `--ngram`.
    Char,
    /// Whitespace-separated words.
    Word,
    None,
}

/// Session settings shared by `run` and the service's session creation.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionOptions {
    /// Total number of labels the session may request.
    #[arg(long)]
    pub budget: usize,
    /// Column selection: ra, rr, mc, me or mpc.
    #[arg(long, default_value = "mc")]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cells per active-learning batch.
    #[arg(long, default_value_t = 10)]
    pub batch_size: usize,
    #[arg(long, value_enum, default_value_t = TextMode::Char)]
    pub text: TextMode,
    /// Character n-gram order.
    #[arg(long, default_value_t = 1)]
    pub ngram: usize,
    /// Cell-value embedding dimensionality.
    #[arg(long, default_value_t = 50)]
    pub embedding_dim: usize,
    #[arg(long)]
    pub no_metadata: bool,
    #[arg(long)]
    pub no_embedding: bool,
    #[arg(long)]
    pub no_error_correlation: bool,
    /// Trees per column committee.
    #[arg(long, default_value_t = 25)]
    pub trees: usize,
    #[arg(long, default_value_t = 4)]
    pub cv_folds: usize,
    /// Initialization probes per column.
    #[arg(long, default_value_t = 20)]
    pub init_cap: usize,
}

impl Default for SessionOptions {
    fn default() -> Self {
        Self {
            budget: 0,
            strategy: Strategy::MinCertainty,
            seed: 0,
            batch_size: 10,
            text: TextMode::Char,
            ngram: 1,
            embedding_dim: 50,
            no_metadata: false,
            no_embedding: false,
            no_error_correlation: false,
            trees: 25,
            cv_folds: 4,
            init_cap: 20,
        }
    }
}

impl SessionOptions {
    pub fn to_config(&self) -> SessionConfig {
        let mut c = SessionConfig::new(self.budget, self.strategy, self.seed);
        c.batch_size = self.batch_size;
        c.features.text = match self.text {
            TextMode::Char => TextFeatures::CharNgrams { n: self.ngram },
            TextMode::Word => TextFeatures::Words,
            TextMode::None => TextFeatures::Off,
        };
        c.features.metadata = !self.no_metadata;
        c.features.embedding_dim = if self.no_embedding { 0 } else { self.embedding_dim };
        c.features.error_correlation = !self.no_error_correlation;
        c.n_trees = self.trees;
        c.cv_folds = self.cv_folds;
        c.init_cap = self.init_cap;
        c
    }
}
