//! Oracle-driven runs on the synthetic employee table, one per seed.
//!
//! cargo run --release --example synthetic_benchmark -- [seeds] [budget] [strategy]

use std::sync::Arc;
use std::time::Instant;

use tabaudit::evaluation::{inject_errors, record_convergence, synth};
use tabaudit::{run_oracle, RunReport, SessionConfig, Strategy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map_or(Ok(3), |s| s.parse())?;
    let budget: usize = args.next().map_or(Ok(600), |s| s.parse())?;
    let strategy: Strategy = args.next().map_or(Ok(Strategy::MinCertainty), |s| s.parse())?;

    let mut curves = Vec::new();
    for seed in 0..seeds {
        let clean = synth::employees(2000, seed);
        let (dirty, truth) = inject_errors(&clean, &synth::employees_plan(seed))?;
        println!("seed {seed}: {} erroneous cells", truth.error_cells(&dirty).len());
        let start = Instant::now();
        let session = run_oracle(Arc::new(dirty), Arc::new(truth), SessionConfig::new(budget, strategy, seed))?;
        let report = RunReport::from_session(&session)?;
        println!(
            "  F1 {:.3} (P {:.3}, R {:.3}) with {} labels in {:.1?}",
            report.final_f1.unwrap_or(0.0),
            report.final_precision.unwrap_or(0.0),
            report.final_recall.unwrap_or(0.0),
            report.labels_used,
            start.elapsed()
        );
        for c in &report.per_column {
            let s = c.score.expect("ground truth attached");
            println!(
                "    {:<12} labels {:>3} ({:>2} err)  F1 {:.3}  P {:.3}  R {:.3}{}",
                c.summary.name,
                c.summary.labels,
                c.summary.erroneous_labels,
                s.f1,
                s.precision,
                s.recall,
                if c.summary.degenerate { "  degenerate" } else { "" }
            );
        }
        curves.push(report.convergence_curve);
    }
    let agg = record_convergence(&curves)?;
    println!("labels  mean F1  std");
    for p in agg.iter().step_by(5) {
        println!("{:>6}  {:.3}    {:.3}", p.labels_used, p.mean_f1, p.std_f1);
    }
    Ok(())
}
