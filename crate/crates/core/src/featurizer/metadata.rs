//! Per-cell metadata: occurrence count, string length, data type and
//! numeric value.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::table::Table;

pub const METADATA_LEN: usize = 9;

pub const METADATA_NAMES: [&str; METADATA_LEN] = [
    "occurrence",
    "string_length",
    "type_empty",
    "type_integer",
    "type_float",
    "type_date",
    "type_text",
    "number",
    "is_numeric",
];

/// Detected type of a cell. Detection order: empty, integer, float, date,
/// text; the first match wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DataType {
    Empty,
    Integer,
    Float,
    Date,
    Text,
}

impl DataType {
    pub fn slot(self) -> usize {
        match self {
            DataType::Empty => 0,
            DataType::Integer => 1,
            DataType::Float => 2,
            DataType::Date => 3,
            DataType::Text => 4,
        }
    }
}

fn strip_sign(s: &str) -> &str {
    s.strip_prefix(['+', '-']).unwrap_or(s)
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn is_integer(s: &str) -> bool {
    all_digits(strip_sign(s))
}

fn is_float(s: &str) -> bool {
    let body = strip_sign(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    if let Some(e) = exponent {
        if !all_digits(strip_sign(e)) {
            return false;
        }
    }
    match mantissa.split_once('.') {
        Some((a, b)) => (all_digits(a) || a.is_empty()) && (all_digits(b) || b.is_empty()) && !(a.is_empty() && b.is_empty()),
        None => all_digits(mantissa),
    }
}

fn is_iso_date(s: &str) -> bool {
    s.len() == 10 && chrono::NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok()
}

pub fn detect_type(s: &str) -> DataType {
    if s.is_empty() {
        DataType::Empty
    } else if is_integer(s) {
        DataType::Integer
    } else if is_float(s) {
        DataType::Float
    } else if is_iso_date(s) {
        DataType::Date
    } else {
        DataType::Text
    }
}

/// Value occurrence counts of one column.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColumnStats {
    counts: HashMap<String, usize>,
}

impl ColumnStats {
    pub fn build(table: &Table, col: usize) -> Self {
        let mut counts = HashMap::new();
        for v in table.column(col) {
            *counts.entry(v.to_owned()).or_insert(0) += 1;
        }
        Self { counts }
    }

    pub fn occurrences(&self, value: &str) -> usize {
        self.counts.get(value).copied().unwrap_or(0)
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }
}

/// `[occurrence, string_length, one-hot type (5), number, is_numeric]`.
/// Non-numeric (or non-finite) values get number 0 and is_numeric 0.
pub fn metadata_vector(cell: &str, stats: &ColumnStats) -> [f64; METADATA_LEN] {
    let mut out = [0.0; METADATA_LEN];
    out[0] = stats.occurrences(cell) as f64;
    out[1] = cell.chars().count() as f64;
    let ty = detect_type(cell);
    out[2 + ty.slot()] = 1.0;
    if matches!(ty, DataType::Integer | DataType::Float) {
        if let Ok(x) = cell.parse::<f64>() {
            if x.is_finite() {
                out[7] = x;
                out[8] = 1.0;
            }
        }
    }
    out
}
