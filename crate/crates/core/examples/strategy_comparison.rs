//! Labels needed to reach a target F1 under each column-selection strategy.
//!
//! cargo run --release --example strategy_comparison -- [seeds] [budget] [target]

use std::sync::Arc;

use tabaudit::evaluation::convergence::{f1_at, labels_to_reach};
use tabaudit::evaluation::{inject_errors, synth};
use tabaudit::{run_oracle, RunReport, SessionConfig, Strategy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map_or(Ok(3), |s| s.parse())?;
    let budget: usize = args.next().map_or(Ok(600), |s| s.parse())?;
    let target: f64 = args.next().map_or(Ok(0.8), |s| s.parse())?;

    let checkpoints: Vec<usize> = (1..=budget / 100).map(|i| i * 100).collect();
    for strategy in Strategy::ALL {
        let mut reached = Vec::new();
        let mut at = vec![0.0; checkpoints.len()];
        for seed in 0..seeds {
            let clean = synth::heterogeneous(2000, seed);
            let (dirty, truth) = inject_errors(&clean, &synth::heterogeneous_plan(seed))?;
            let session = run_oracle(Arc::new(dirty), Arc::new(truth), SessionConfig::new(budget, strategy, seed))?;
            let curve = RunReport::from_session(&session)?.convergence_curve;
            reached.push(labels_to_reach(&curve, target));
            for (i, &c) in checkpoints.iter().enumerate() {
                at[i] += f1_at(&curve, c) / seeds as f64;
            }
        }
        let shown: Vec<String> = reached
            .iter()
            .map(|r| r.map_or("-".to_string(), |l| l.to_string()))
            .collect();
        let curve: Vec<String> = at.iter().map(|f| format!("{f:.3}")).collect();
        println!("{strategy:<4} labels to F1 {target}: [{}]  F1 at {checkpoints:?}: [{}]", shown.join(", "), curve.join(", "));
    }
    Ok(())
}
