//! Seeded clean-table generators and matching injection plans for the
//! desk-scale benchmarks.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::inject::{ErrorSpec, InjectionPlan, Mutation};
use crate::table::Table;

const FIRST_NAMES: &[&str] = &[
    "Alice", "Bertram", "Chiara", "Dmitri", "Elena", "Farid", "Greta", "Hiroshi", "Ines", "Jonas", "Kalinda",
    "Lorenzo", "Mireille", "Nadia", "Oskar", "Priya", "Quentin", "Rosalind", "Soren", "Tamsin", "Ulrich",
    "Valeria", "Wendell", "Ximena", "Yusuf", "Zofia", "Anton", "Beatrix", "Cyrus", "Delphine", "Emeric",
    "Fiona", "Gideon", "Hester", "Ivor", "Juno", "Kasimir", "Leontine", "Matthias", "Noor",
];

/// (city, state, zip codes)
const CITIES: &[(&str, &str, &[&str])] = &[
    ("Springfield", "IL", &["62701", "62702", "62703"]),
    ("Madison", "WI", &["53703", "53704"]),
    ("Portland", "OR", &["97201", "97205", "97209"]),
    ("Austin", "TX", &["73301", "78701"]),
    ("Boulder", "CO", &["80301", "80302"]),
    ("Savannah", "GA", &["31401"]),
    ("Burlington", "VT", &["05401", "05402"]),
    ("Tucson", "AZ", &["85701", "85705"]),
    ("Ithaca", "NY", &["14850"]),
    ("Asheville", "NC", &["28801", "28803"]),
    ("Spokane", "WA", &["99201", "99203"]),
    ("Provo", "UT", &["84601"]),
    ("Duluth", "MN", &["55802", "55803"]),
    ("Bozeman", "MT", &["59715"]),
    ("Eugene", "OR", &["97401", "97403"]),
    ("Fresno", "CA", &["93701", "93702"]),
    ("Lansing", "MI", &["48901", "48906"]),
    ("Mobile", "AL", &["36602"]),
    ("Reno", "NV", &["89501", "89502"]),
    ("Tulsa", "OK", &["74103", "74104"]),
];

/// (department, titles)
const DEPARTMENTS: &[(&str, &[&str])] = &[
    ("Engineering", &["Software Engineer", "Staff Engineer", "Engineering Manager"]),
    ("Finance", &["Accountant", "Controller"]),
    ("Marketing", &["Brand Manager", "Copywriter", "Growth Analyst"]),
    ("Sales", &["Account Executive", "Sales Director"]),
    ("Support", &["Support Agent", "Support Lead"]),
    ("Legal", &["Counsel", "Paralegal"]),
    ("Research", &["Research Scientist", "Lab Technician"]),
    ("Operations", &["Operations Analyst", "Logistics Coordinator"]),
];

fn weighted<'a, T>(items: &'a [T], rng: &mut impl Rng) -> &'a T {
    // Mildly skewed: earlier items are up to three times as likely.
    let n = items.len();
    let weights: Vec<f64> = (0..n).map(|i| 3.0 - 2.0 * i as f64 / n.max(1) as f64).collect();
    let total: f64 = weights.iter().sum();
    let mut x = rng.random_range(0.0..total);
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return &items[i];
        }
        x -= w;
    }
    &items[n - 1]
}

/// Employee records with functional dependencies `city -> state`,
/// `city -> zip` (one of a few) and `department -> title` (one of a few).
///
/// Columns: name, city, state, zip, salary (`$` prefixed, rounded to the
/// thousand), shift_start (`HH:MM` on the half hour), department, title.
pub fn employees(n_rows: usize, seed: u64) -> Table {
    let mut rng = crate::seed::rng(seed, &[0xE11]);
    let schema = ["name", "city", "state", "zip", "salary", "shift_start", "department", "title"];
    let rows = (0..n_rows)
        .map(|_| {
            let name = *FIRST_NAMES.choose(&mut rng).expect("names");
            let (city, state, zips) = weighted(CITIES, &mut rng);
            let zip = zips.choose(&mut rng).expect("zips");
            let salary = format!("${}", rng.random_range(35..=140) * 1000);
            let shift = format!("{:02}:{}", rng.random_range(6..=14), if rng.random_bool(0.5) { "00" } else { "30" });
            let (dept, titles) = weighted(DEPARTMENTS, &mut rng);
            let title = titles.choose(&mut rng).expect("titles");
            vec![
                name.to_string(),
                city.to_string(),
                state.to_string(),
                zip.to_string(),
                salary,
                shift,
                dept.to_string(),
                title.to_string(),
            ]
        })
        .collect();
    Table::new(schema.iter().map(|s| s.to_string()).collect(), rows).expect("rectangular")
}

/// Errors for [`employees`]: every column between 2% and 15%, all five
/// error kinds.
pub fn employees_plan(seed: u64) -> InjectionPlan {
    let s = |x: &str| x.to_string();
    InjectionPlan {
        seed,
        errors: vec![
            ErrorSpec::Typo { column: s("name"), rate: 0.05 },
            ErrorSpec::Typo { column: s("city"), rate: 0.08 },
            ErrorSpec::CrossColumnViolation {
                column: s("state"),
                determinant: s("city"),
                rate: 0.03,
            },
            ErrorSpec::Missing { column: s("zip"), rate: 0.06 },
            ErrorSpec::FormatViolation {
                column: s("salary"),
                rate: 0.12,
                marker: '$',
            },
            ErrorSpec::FormatViolation {
                column: s("shift_start"),
                rate: 0.04,
                marker: ':',
            },
            ErrorSpec::CorrelatedPair {
                lead: s("department"),
                dependent: s("title"),
                rate: 0.03,
                lead_mutation: Mutation::Typo,
                dependent_mutation: Mutation::Typo,
            },
            ErrorSpec::Typo { column: s("department"), rate: 0.02 },
            ErrorSpec::Missing { column: s("title"), rate: 0.02 },
        ],
    }
}

/// Pay records with a few hundred distinct values per column: `salary` and
/// `bonus` as `$` plus an amount, `clock_in` and `clock_out` as `HH:MM` on
/// five-minute steps.
pub fn payroll(n_rows: usize, seed: u64) -> Table {
    let mut rng = crate::seed::rng(seed, &[0x9A7]);
    let rows = (0..n_rows)
        .map(|_| {
            vec![
                format!("${}", rng.random_range(30..=150) * 1000),
                format!("{:02}:{:02}", rng.random_range(6..=11), rng.random_range(0..12) * 5),
                format!("{:02}:{:02}", rng.random_range(14..=20), rng.random_range(0..12) * 5),
                format!("${}", rng.random_range(1..=60) * 50),
            ]
        })
        .collect();
    Table::new(
        vec!["salary".into(), "clock_in".into(), "clock_out".into(), "bonus".into()],
        rows,
    )
    .expect("rectangular")
}

/// Marker-stripping errors for [`payroll`].
pub fn payroll_plan(seed: u64) -> InjectionPlan {
    let fv = |column: &str, marker| ErrorSpec::FormatViolation {
        column: column.to_string(),
        rate: 0.08,
        marker,
    };
    InjectionPlan {
        seed,
        errors: vec![fv("salary", '$'), fv("clock_in", ':'), fv("clock_out", ':'), fv("bonus", '$')],
    }
}

/// Employee columns whose errors differ widely in how many labels they
/// take to learn: frequent typos in four categorical columns and rare
/// marker violations in two formatted ones.
pub fn heterogeneous(n_rows: usize, seed: u64) -> Table {
    employees(n_rows, seed)
        .project(&["name", "city", "salary", "shift_start", "department", "title"])
        .expect("columns exist")
}

pub fn heterogeneous_plan(seed: u64) -> InjectionPlan {
    let s = |x: &str| x.to_string();
    InjectionPlan {
        seed,
        errors: vec![
            ErrorSpec::Typo { column: s("name"), rate: 0.15 },
            ErrorSpec::Typo { column: s("city"), rate: 0.12 },
            ErrorSpec::FormatViolation { column: s("salary"), rate: 0.02, marker: '$' },
            ErrorSpec::FormatViolation { column: s("shift_start"), rate: 0.02, marker: ':' },
            ErrorSpec::Typo { column: s("department"), rate: 0.10 },
            ErrorSpec::Typo { column: s("title"), rate: 0.08 },
        ],
    }
}

const RARE_TITLES: &[&str] = &[
    "Archivist", "Ombudsman", "Actuary", "Cartographer", "Sommelier", "Glazier", "Luthier", "Farrier",
    "Chandler", "Cooper", "Wainwright", "Fletcher", "Bowyer", "Assayer", "Lapidary", "Taxidermist",
    "Horologist", "Lexicographer", "Genealogist", "Curator", "Conservator", "Docent", "Registrar",
    "Bursar", "Provost", "Steward", "Quartermaster", "Purser", "Almoner", "Verger", "Sexton", "Beadle",
    "Chamberlain", "Seneschal", "Castellan", "Herald", "Pursuivant", "Notary", "Scrivener", "Stenographer",
];

/// Employee columns for the correlated-error benchmark. About 3% of titles
/// are rare clean values, so a rare title alone is weak evidence of an
/// error.
pub fn correlated(n_rows: usize, seed: u64) -> Table {
    let mut t = employees(n_rows, seed)
        .project(&["name", "city", "salary", "department", "title"])
        .expect("columns exist");
    let mut rng = crate::seed::rng(seed, &[0xC0DE]);
    for row in 0..n_rows {
        if rng.random_bool(0.03) {
            let v = RARE_TITLES.choose(&mut rng).expect("titles");
            t.set(row, 4, v.to_string());
        }
    }
    t
}

/// Department and title corrupted together in `pair_rate` of the rows; the
/// title has no other errors, the department has independent typos too.
pub fn correlated_plan(seed: u64, pair_rate: f64) -> InjectionPlan {
    let s = |x: &str| x.to_string();
    InjectionPlan {
        seed,
        errors: vec![
            ErrorSpec::CorrelatedPair {
                lead: s("department"),
                dependent: s("title"),
                rate: pair_rate,
                lead_mutation: Mutation::Typo,
                dependent_mutation: Mutation::Typo,
            },
            ErrorSpec::Typo { column: s("department"), rate: 0.08 },
            ErrorSpec::Typo { column: s("city"), rate: 0.05 },
            ErrorSpec::FormatViolation { column: s("salary"), rate: 0.05, marker: '$' },
            ErrorSpec::Typo { column: s("name"), rate: 0.03 },
        ],
    }
}
