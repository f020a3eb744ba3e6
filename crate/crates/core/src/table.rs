//! The dirty table, its optional ground truth, and CSV ingestion.
//!
//! Every cell is kept as an opaque UTF-8 string. Interpreting values
//! (numbers, dates) is the featurizer's job.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ShapeDim};

/// Coordinates of one cell: tuple `row`, attribute `col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellRef {
    pub row: usize,
    pub col: usize,
}

impl CellRef {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// An immutable N x M grid of string cells with a column schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    schema: Vec<String>,
    // row-major, n_rows * n_cols
    cells: Vec<String>,
    n_rows: usize,
}

impl Table {
    /// Builds a table from rows. Fails on ragged input or zero rows/columns.
    pub fn new(schema: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyTable);
        }
        let n_cols = schema.len();
        if n_cols == 0 {
            return Err(Error::ShapeMismatch(ShapeDim::Cols));
        }
        let n_rows = rows.len();
        let mut cells = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::RaggedRows {
                    row: i + 1,
                    found: row.len(),
                    expected: n_cols,
                });
            }
            cells.extend(row);
        }
        Ok(Self {
            schema,
            cells,
            n_rows,
        })
    }

    /// Column names `col_0 .. col_{m-1}`.
    pub fn synthetic_schema(n_cols: usize) -> Vec<String> {
        (0..n_cols).map(|j| format!("col_{j}")).collect()
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.schema.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn column_name(&self, col: usize) -> &str {
        &self.schema[col]
    }

    /// Index of the first column called `name`.
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|c| c == name)
    }

    /// Cell value. Panics when out of bounds; see [`Table::try_get`].
    pub fn get(&self, row: usize, col: usize) -> &str {
        assert!(row < self.n_rows && col < self.n_cols(), "cell ({row}, {col}) out of bounds");
        &self.cells[row * self.n_cols() + col]
    }

    pub fn try_get(&self, cell: CellRef) -> Result<&str> {
        self.check(cell)?;
        Ok(self.get(cell.row, cell.col))
    }

    pub fn check(&self, cell: CellRef) -> Result<()> {
        if cell.row < self.n_rows && cell.col < self.n_cols() {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                row: cell.row,
                col: cell.col,
            })
        }
    }

    pub fn row(&self, row: usize) -> &[String] {
        let m = self.n_cols();
        &self.cells[row * m..(row + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[String]> + '_ {
        self.cells.chunks(self.n_cols())
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = &str> + '_ {
        let m = self.n_cols();
        self.cells[col..].iter().step_by(m).map(String::as_str)
    }

    /// A new table with only the named columns, in the given order.
    pub fn project(&self, columns: &[&str]) -> Result<Table> {
        let idx = columns
            .iter()
            .map(|c| self.column_index(c).ok_or(Error::ShapeMismatch(ShapeDim::Schema)))
            .collect::<Result<Vec<_>>>()?;
        let rows = self.rows().map(|r| idx.iter().map(|&j| r[j].clone()).collect()).collect();
        Table::new(columns.iter().map(|c| c.to_string()).collect(), rows)
    }

    /// Replaces one cell in place.
    pub(crate) fn set(&mut self, row: usize, col: usize, value: String) {
        let m = self.n_cols();
        self.cells[row * m + col] = value;
    }

    /// Parses RFC 4180 CSV from a reader.
    pub fn from_reader<R: Read>(reader: R, has_header: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(reader);
        let mut records = rdr.records();
        let schema: Option<Vec<String>> = if has_header {
            match records.next() {
                Some(rec) => Some(rec?.iter().map(str::to_owned).collect()),
                None => return Err(Error::EmptyTable),
            }
        } else {
            None
        };
        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut expected = schema.as_ref().map(Vec::len);
        for (i, rec) in records.enumerate() {
            let rec = rec?;
            let width = *expected.get_or_insert(rec.len());
            if rec.len() != width {
                return Err(Error::RaggedRows {
                    row: i + 1,
                    found: rec.len(),
                    expected: width,
                });
            }
            rows.push(rec.iter().map(str::to_owned).collect());
        }
        if rows.is_empty() {
            return Err(Error::EmptyTable);
        }
        let schema = schema.unwrap_or_else(|| Self::synthetic_schema(rows[0].len()));
        Self::new(schema, rows)
    }

    pub fn from_csv_str(text: &str, has_header: bool) -> Result<Self> {
        Self::from_reader(text.as_bytes(), has_header)
    }

    /// Serializes the table (with header) as CSV.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().from_writer(writer);
        wtr.write_record(&self.schema)?;
        for row in self.rows() {
            wtr.write_record(row)?;
        }
        wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output of utf-8 cells is utf-8")
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Reads a CSV file into a [`Table`].
pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<Table> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Table::from_reader(std::io::BufReader::new(file), has_header)
}

/// The cleaned version of a dirty table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    clean: Table,
}

impl GroundTruth {
    pub fn table(&self) -> &Table {
        &self.clean
    }

    pub fn get(&self, row: usize, col: usize) -> &str {
        self.clean.get(row, col)
    }

    /// True when the dirty value deviates from the clean one.
    pub fn is_error(&self, dirty: &Table, cell: CellRef) -> bool {
        dirty.get(cell.row, cell.col) != self.clean.get(cell.row, cell.col)
    }

    /// All erroneous cells in row-major order.
    pub fn error_cells(&self, dirty: &Table) -> Vec<CellRef> {
        let mut out = Vec::new();
        for i in 0..dirty.n_rows() {
            for j in 0..dirty.n_cols() {
                let c = CellRef::new(i, j);
                if self.is_error(dirty, c) {
                    out.push(c);
                }
            }
        }
        out
    }
}

/// Binds a clean table to a dirty one. Shapes and column names must agree
/// positionally.
pub fn attach_ground_truth(dirty: &Table, clean: Table) -> Result<GroundTruth> {
    if dirty.n_rows() != clean.n_rows() {
        return Err(Error::ShapeMismatch(ShapeDim::Rows));
    }
    if dirty.n_cols() != clean.n_cols() {
        return Err(Error::ShapeMismatch(ShapeDim::Cols));
    }
    if dirty.schema() != clean.schema() {
        return Err(Error::ShapeMismatch(ShapeDim::Schema));
    }
    Ok(GroundTruth { clean })
}
