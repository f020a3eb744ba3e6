//! Character n-grams against word tokens on marker-stripping errors, with
//! every other feature block switched off.
//!
//! cargo run --release --example feature_ablation -- [seeds] [budget]

use std::sync::Arc;

use tabaudit::evaluation::{inject_errors, synth};
use tabaudit::featurizer::{FeatureConfig, TextFeatures};
use tabaudit::{run_oracle, RunReport, SessionConfig, Strategy};

fn text_only(text: TextFeatures) -> FeatureConfig {
    FeatureConfig {
        text,
        metadata: false,
        embedding_dim: 0,
        error_correlation: false,
        ..FeatureConfig::default()
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map_or(Ok(3), |s| s.parse())?;
    let budget: usize = args.next().map_or(Ok(150), |s| s.parse())?;

    let variants = [
        ("char unigrams", text_only(TextFeatures::CharNgrams { n: 1 })),
        ("char bigrams", text_only(TextFeatures::CharNgrams { n: 2 })),
        ("words", text_only(TextFeatures::Words)),
        ("all blocks", FeatureConfig::default()),
    ];
    for (name, features) in variants {
        let mut f1s = Vec::new();
        for seed in 0..seeds {
            let clean = synth::payroll(2000, seed);
            let (dirty, truth) = inject_errors(&clean, &synth::payroll_plan(seed))?;
            let mut config = SessionConfig::new(budget, Strategy::MinCertainty, seed);
            config.features = features.clone();
            let session = run_oracle(Arc::new(dirty), Arc::new(truth), config)?;
            f1s.push(RunReport::from_session(&session)?.final_f1.unwrap_or(0.0));
        }
        let mean = f1s.iter().sum::<f64>() / f1s.len() as f64;
        let shown: Vec<String> = f1s.iter().map(|f| format!("{f:.3}")).collect();
        println!("{name:<14} mean F1 {mean:.3}  per seed [{}]", shown.join(", "));
    }
    Ok(())
}
