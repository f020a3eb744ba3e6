//! Builds an injection plan, applies it, and writes the dirty table and
//! ground truth as CSV.
//!
//! cargo run --release --example inject_errors -- [out_dir]

use std::path::PathBuf;

use tabaudit::evaluation::{inject_errors, synth, ErrorSpec, InjectionPlan, Mutation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args().nth(1).map_or_else(std::env::temp_dir, PathBuf::from);
    let clean = synth::employees(1000, 3);
    let s = |x: &str| x.to_string();
    let plan = InjectionPlan {
        seed: 3,
        errors: vec![
            ErrorSpec::Typo { column: s("city"), rate: 0.05 },
            ErrorSpec::Missing { column: s("zip"), rate: 0.03 },
            ErrorSpec::FormatViolation { column: s("salary"), rate: 0.04, marker: '$' },
            ErrorSpec::CrossColumnViolation { column: s("state"), determinant: s("city"), rate: 0.02 },
            ErrorSpec::CorrelatedPair {
                lead: s("department"),
                dependent: s("title"),
                rate: 0.02,
                lead_mutation: Mutation::Typo,
                dependent_mutation: Mutation::Swap,
            },
        ],
    };
    println!("{}", plan.to_json());

    let (dirty, truth) = inject_errors(&clean, &plan)?;
    for col in 0..dirty.n_cols() {
        let n = (0..dirty.n_rows()).filter(|&r| dirty.get(r, col) != clean.get(r, col)).count();
        println!("{:<12} {:>4} corrupted", dirty.column_name(col), n);
    }
    let (d, g, p) = (out.join("dirty.csv"), out.join("clean.csv"), out.join("plan.json"));
    dirty.save_csv(&d)?;
    truth.table().save_csv(&g)?;
    std::fs::write(&p, plan.to_json())?;
    println!("wrote {}, {} and {}", d.display(), g.display(), p.display());
    Ok(())
}
