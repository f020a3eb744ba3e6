//! Seeded synthetic error injection into a clean table.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{attach_ground_truth, CellRef, GroundTruth, Table};

/// How a single cell is corrupted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Mutation {
    /// Substitute, delete or insert one character.
    Typo,
    /// Replace with the empty string.
    Missing,
    /// Remove every occurrence of `marker`.
    FormatViolation { marker: char },
    /// Replace with another value of the same column.
    Swap,
}

/// One entry of an injection plan. Columns are named by header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ErrorSpec {
    Typo { column: String, rate: f64 },
    Missing { column: String, rate: f64 },
    FormatViolation { column: String, rate: f64, marker: char },
    /// Overwrite with a value that the clean table pairs with a different
    /// `determinant` value, breaking the dependency `determinant -> column`.
    CrossColumnViolation { column: String, determinant: String, rate: f64 },
    /// Corrupt both columns of the same row.
    CorrelatedPair {
        lead: String,
        dependent: String,
        rate: f64,
        lead_mutation: Mutation,
        dependent_mutation: Mutation,
    },
}

impl ErrorSpec {
    fn rate(&self) -> f64 {
        match self {
            ErrorSpec::Typo { rate, .. }
            | ErrorSpec::Missing { rate, .. }
            | ErrorSpec::FormatViolation { rate, .. }
            | ErrorSpec::CrossColumnViolation { rate, .. }
            | ErrorSpec::CorrelatedPair { rate, .. } => *rate,
        }
    }

    fn columns(&self) -> Vec<&str> {
        match self {
            ErrorSpec::Typo { column, .. }
            | ErrorSpec::Missing { column, .. }
            | ErrorSpec::FormatViolation { column, .. } => vec![column],
            ErrorSpec::CrossColumnViolation { column, determinant, .. } => vec![column, determinant],
            ErrorSpec::CorrelatedPair { lead, dependent, .. } => vec![lead, dependent],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionPlan {
    pub seed: u64,
    pub errors: Vec<ErrorSpec>,
}

impl InjectionPlan {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::BadPlan(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn validate(&self, table: &Table) -> Result<()> {
        for spec in &self.errors {
            let rate = spec.rate();
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::BadPlan(format!("rate {rate} is outside [0, 1]")));
            }
            let cols = spec.columns();
            for c in &cols {
                if table.column_index(c).is_none() {
                    return Err(Error::BadPlan(format!("no column named {c:?}")));
                }
            }
            if cols.len() == 2 && cols[0] == cols[1] {
                return Err(Error::BadPlan(format!("{:?} is paired with itself", cols[0])));
            }
        }
        Ok(())
    }
}

const TYPO_ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";

/// One random single-character edit that changes `value`.
pub fn typo(value: &str, rng: &mut impl Rng) -> String {
    let chars: Vec<char> = value.chars().collect();
    loop {
        let c = char::from(*TYPO_ALPHABET.choose(rng).expect("alphabet is non-empty"));
        let op = if chars.is_empty() { 2 } else { rng.random_range(0..3) };
        let mut out = chars.clone();
        match op {
            0 => {
                let i = rng.random_range(0..out.len());
                out[i] = c;
            }
            1 => {
                out.remove(rng.random_range(0..out.len()));
            }
            _ => {
                let i = rng.random_range(0..=out.len());
                out.insert(i, c);
            }
        }
        let out: String = out.into_iter().collect();
        if out != value {
            return out;
        }
    }
}

struct Injector<'a> {
    clean: &'a Table,
    dirty: Table,
    touched: BTreeSet<CellRef>,
    rng: ChaCha8Rng,
    domains: HashMap<usize, Vec<String>>,
}

impl Injector<'_> {
    fn domain(&mut self, col: usize) -> &[String] {
        let clean = self.clean;
        self.domains.entry(col).or_insert_with(|| {
            let set: BTreeSet<&str> = clean.column(col).collect();
            set.into_iter().map(str::to_owned).collect()
        })
    }

    fn mutate(&mut self, cell: CellRef, mutation: &Mutation) -> String {
        let original = self.clean.get(cell.row, cell.col).to_string();
        let out = match mutation {
            Mutation::Typo => None,
            Mutation::Missing => Some(String::new()),
            Mutation::FormatViolation { marker } => Some(original.replace(*marker, "")),
            Mutation::Swap => {
                let others: Vec<String> = self.domain(cell.col).iter().filter(|v| **v != original).cloned().collect();
                others.choose(&mut self.rng).cloned()
            }
        };
        match out {
            Some(v) if v != original => v,
            // The requested mutation cannot change this value.
            _ => typo(&original, &mut self.rng),
        }
    }

    fn cross_column(&mut self, cell: CellRef, determinant: usize) -> String {
        let original = self.clean.get(cell.row, cell.col).to_string();
        let det = self.clean.get(cell.row, determinant);
        let mut pairs: BTreeSet<&str> = BTreeSet::new();
        for r in 0..self.clean.n_rows() {
            if self.clean.get(r, determinant) != det {
                let v = self.clean.get(r, cell.col);
                if v != original {
                    pairs.insert(v);
                }
            }
        }
        let pool: Vec<&str> = pairs.into_iter().collect();
        match pool.choose(&mut self.rng) {
            Some(v) => v.to_string(),
            None => typo(&original, &mut self.rng),
        }
    }

    fn write(&mut self, cell: CellRef, value: String) {
        self.dirty.set(cell.row, cell.col, value);
        self.touched.insert(cell);
    }
}

/// Corrupts a copy of `clean` according to `plan`. Each spec draws one
/// Bernoulli trial per row; a cell is corrupted at most once, and every
/// corrupted cell differs from its clean value. The ground truth is the
/// clean table.
pub fn inject_errors(clean: &Table, plan: &InjectionPlan) -> Result<(Table, GroundTruth)> {
    plan.validate(clean)?;
    let mut inj = Injector {
        clean,
        dirty: clean.clone(),
        touched: BTreeSet::new(),
        rng: crate::seed::rng(plan.seed, &[]),
        domains: HashMap::new(),
    };
    let idx = |name: &str| clean.column_index(name).expect("validated");
    for spec in &plan.errors {
        let rate = spec.rate();
        for row in 0..clean.n_rows() {
            if !inj.rng.random_bool(rate) {
                continue;
            }
            match spec {
                ErrorSpec::Typo { column, .. } => {
                    let cell = CellRef::new(row, idx(column));
                    if !inj.touched.contains(&cell) {
                        let v = inj.mutate(cell, &Mutation::Typo);
                        inj.write(cell, v);
                    }
                }
                ErrorSpec::Missing { column, .. } => {
                    let cell = CellRef::new(row, idx(column));
                    if !inj.touched.contains(&cell) {
                        let v = inj.mutate(cell, &Mutation::Missing);
                        inj.write(cell, v);
                    }
                }
                ErrorSpec::FormatViolation { column, marker, .. } => {
                    let cell = CellRef::new(row, idx(column));
                    if !inj.touched.contains(&cell) {
                        let v = inj.mutate(cell, &Mutation::FormatViolation { marker: *marker });
                        inj.write(cell, v);
                    }
                }
                ErrorSpec::CrossColumnViolation { column, determinant, .. } => {
                    let cell = CellRef::new(row, idx(column));
                    if !inj.touched.contains(&cell) {
                        let v = inj.cross_column(cell, idx(determinant));
                        inj.write(cell, v);
                    }
                }
                ErrorSpec::CorrelatedPair {
                    lead,
                    dependent,
                    lead_mutation,
                    dependent_mutation,
                    ..
                } => {
                    let a = CellRef::new(row, idx(lead));
                    let b = CellRef::new(row, idx(dependent));
                    if !inj.touched.contains(&a) && !inj.touched.contains(&b) {
                        let va = inj.mutate(a, lead_mutation);
                        let vb = inj.mutate(b, dependent_mutation);
                        inj.write(a, va);
                        inj.write(b, vb);
                    }
                }
            }
        }
    }
    let dirty = inj.dirty;
    let truth = attach_ground_truth(&dirty, clean.clone())?;
    Ok((dirty, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clean() -> Table {
        let rows = (0..200)
            .map(|i| vec![format!("${}", 1000 + i % 7), ["London", "Paris", "Rome"][i % 3].to_string()])
            .collect();
        Table::new(vec!["salary".into(), "city".into()], rows).unwrap()
    }

    fn plan(errors: Vec<ErrorSpec>) -> InjectionPlan {
        InjectionPlan { seed: 3, errors }
    }

    #[test]
    fn zero_rate_is_identity() {
        let t = clean();
        let (d, _) = inject_errors(&t, &plan(vec![ErrorSpec::Typo { column: "city".into(), rate: 0.0 }])).unwrap();
        assert_eq!(d, t);
    }

    #[test]
    fn full_rate_changes_every_cell() {
        let t = clean();
        for spec in [
            ErrorSpec::Typo { column: "city".into(), rate: 1.0 },
            ErrorSpec::Missing { column: "city".into(), rate: 1.0 },
            ErrorSpec::FormatViolation { column: "city".into(), rate: 1.0, marker: '$' },
            ErrorSpec::CrossColumnViolation { column: "city".into(), determinant: "salary".into(), rate: 1.0 },
        ] {
            let (d, gt) = inject_errors(&t, &plan(vec![spec])).unwrap();
            assert_eq!(gt.error_cells(&d).len(), 200);
            assert!((0..200).all(|r| d.get(r, 0) == t.get(r, 0)));
        }
    }

    #[test]
    fn format_violation_strips_marker() {
        let t = clean();
        let (d, _) = inject_errors(
            &t,
            &plan(vec![ErrorSpec::FormatViolation { column: "salary".into(), rate: 1.0, marker: '$' }]),
        )
        .unwrap();
        assert_eq!(d.get(0, 0), "1000");
    }

    #[test]
    fn correlated_pair_hits_both_columns() {
        let t = clean();
        let (d, gt) = inject_errors(
            &t,
            &plan(vec![ErrorSpec::CorrelatedPair {
                lead: "salary".into(),
                dependent: "city".into(),
                rate: 0.2,
                lead_mutation: Mutation::Missing,
                dependent_mutation: Mutation::Swap,
            }]),
        )
        .unwrap();
        let errs = gt.error_cells(&d);
        assert!(!errs.is_empty());
        for r in 0..200 {
            assert_eq!(gt.is_error(&d, CellRef::new(r, 0)), gt.is_error(&d, CellRef::new(r, 1)));
        }
    }

    #[test]
    fn unknown_column_and_bad_rate() {
        let t = clean();
        assert!(matches!(
            inject_errors(&t, &plan(vec![ErrorSpec::Typo { column: "zip".into(), rate: 0.1 }])),
            Err(Error::BadPlan(_))
        ));
        assert!(matches!(
            inject_errors(&t, &plan(vec![ErrorSpec::Typo { column: "city".into(), rate: 1.5 }])),
            Err(Error::BadPlan(_))
        ));
    }

    #[test]
    fn plan_json_shape() {
        let p = InjectionPlan::from_json(
            r#"{"seed": 1, "errors": [
                {"type": "format_violation", "column": "salary", "rate": 0.1, "marker": "$"},
                {"type": "correlated_pair", "lead": "salary", "dependent": "city", "rate": 0.01,
                 "lead_mutation": {"type": "missing"}, "dependent_mutation": {"type": "typo"}}
            ]}"#,
        )
        .unwrap();
        assert_eq!(p.errors.len(), 2);
        assert_eq!(InjectionPlan::from_json(&p.to_json()).unwrap(), p);
    }
}
