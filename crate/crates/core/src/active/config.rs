use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classifier::{default_grid, Hyperparams};
use crate::error::{Error, Result};
use crate::featurizer::FeatureConfig;

/// Column selection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "ra")]
    Random,
    #[serde(rename = "rr")]
    RoundRobin,
    #[serde(rename = "mc")]
    MinCertainty,
    #[serde(rename = "me")]
    MaxError,
    #[serde(rename = "mpc")]
    MaxPredictionChange,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Random,
        Strategy::RoundRobin,
        Strategy::MinCertainty,
        Strategy::MaxError,
        Strategy::MaxPredictionChange,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Random => "ra",
            Strategy::RoundRobin => "rr",
            Strategy::MinCertainty => "mc",
            Strategy::MaxError => "me",
            Strategy::MaxPredictionChange => "mpc",
        }
    }

    /// Whether the strategy runs a round-robin warm-up pass first.
    pub fn needs_warmup(self) -> bool {
        matches!(
            self,
            Strategy::MinCertainty | Strategy::MaxError | Strategy::MaxPredictionChange
        )
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ra" | "random" => Ok(Strategy::Random),
            "rr" | "round-robin" | "roundrobin" => Ok(Strategy::RoundRobin),
            "mc" | "min-certainty" => Ok(Strategy::MinCertainty),
            "me" | "max-error" => Ok(Strategy::MaxError),
            "mpc" | "max-prediction-change" => Ok(Strategy::MaxPredictionChange),
            other => Err(Error::Config(format!("unknown strategy {other:?} (expected ra, rr, mc, me or mpc)"))),
        }
    }
}

pub const DEFAULT_BATCH_SIZE: usize = 10;
pub const DEFAULT_N_TREES: usize = 25;
pub const DEFAULT_CV_FOLDS: usize = 4;
pub const DEFAULT_INIT_CAP: usize = 20;
/// Labels wanted per class and column before active learning starts.
pub const INIT_PER_CLASS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub batch_size: usize,
    pub budget: usize,
    pub strategy: Strategy,
    pub features: FeatureConfig,
    pub seed: u64,
    pub n_trees: usize,
    pub cv_folds: usize,
    pub grid: Vec<Hyperparams>,
    /// Initialization probes per column before giving up on a class.
    pub init_cap: usize,
}

impl SessionConfig {
    pub fn new(budget: usize, strategy: Strategy, seed: u64) -> Self {
        Self {
            batch_size: DEFAULT_BATCH_SIZE,
            budget,
            strategy,
            features: FeatureConfig::default(),
            seed,
            n_trees: DEFAULT_N_TREES,
            cv_folds: DEFAULT_CV_FOLDS,
            grid: default_grid(),
            init_cap: DEFAULT_INIT_CAP,
        }
    }

    /// Smallest budget that can initialize `n_cols` columns.
    pub fn min_budget(n_cols: usize) -> usize {
        2 * INIT_PER_CLASS * n_cols
    }

    pub fn validate(&self, n_cols: usize) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.n_trees == 0 {
            return Err(Error::Config("committee needs at least one tree".into()));
        }
        if self.cv_folds < 2 {
            return Err(Error::Config("cross-validation needs at least 2 folds".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::Config("hyperparameter grid is empty".into()));
        }
        if self.grid.iter().any(|h| h.max_depth == 0 || h.min_leaf == 0) {
            return Err(Error::Config("grid entries need max_depth >= 1 and min_leaf >= 1".into()));
        }
        if self.init_cap < 2 * INIT_PER_CLASS {
            return Err(Error::Config(format!("init cap must be at least {}", 2 * INIT_PER_CLASS)));
        }
        if let crate::featurizer::TextFeatures::CharNgrams { n: 0 } = self.features.text {
            return Err(Error::Config("n-gram size must be at least 1".into()));
        }
        let need = Self::min_budget(n_cols);
        if self.budget < need {
            return Err(Error::BudgetExhausted(format!(
                "budget {} is below the {need} labels initialization needs for {n_cols} columns",
                self.budget
            )));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
