//! Labels needed on a dependent column with and without the
//! error-correlation feature block.
//!
//! cargo run --release --example error_correlation -- [seeds] [budget] [pair_rate]

use std::sync::Arc;

use tabaudit::evaluation::{inject_errors, score_column, synth};
use tabaudit::{run_oracle_observed, SessionConfig, Strategy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map_or(Ok(3), |s| s.parse())?;
    let budget: usize = args.next().map_or(Ok(400), |s| s.parse())?;
    let pair_rate: f64 = args.next().map_or(Ok(0.01), |s| s.parse())?;
    let target = 0.7;
    let rows: usize = std::env::var("ROWS").ok().and_then(|r| r.parse().ok()).unwrap_or(2000);

    for seed in 0..seeds {
        let clean = synth::correlated(rows, seed);
        let (dirty, truth) = inject_errors(&clean, &synth::correlated_plan(seed, pair_rate))?;
        let dependent = dirty.column_index("title").expect("title column");
        let (dirty, truth) = (Arc::new(dirty), Arc::new(truth));
        let mut line = format!("seed {seed}:");
        for enabled in [true, false] {
            let mut config = SessionConfig::new(budget, Strategy::MinCertainty, seed);
            config.features.error_correlation = enabled;
            let mut reached = None;
            let session = run_oracle_observed(dirty.clone(), truth.clone(), config, |s| {
                let f1 = score_column(&s.final_predictions(), s.table(), &truth, dependent)
                    .map_or(0.0, |sc| sc.f1);
                if reached.is_none() && f1 >= target {
                    reached = Some(s.labels_used());
                }
            })?;
            let final_f1 = score_column(&session.final_predictions(), &dirty, &truth, dependent)?.f1;
            let counts = session.labels().counts(dependent);
            line += &format!(
                "  errcorr={enabled}: reached {} (final F1 {final_f1:.3}, {} title labels, {} err)",
                reached.map_or("-".to_string(), |l| l.to_string()),
                counts.total(),
                counts.erroneous
            );
        }
        println!("{line}");
    }
    Ok(())
}
