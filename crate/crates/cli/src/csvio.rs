//! Headerless numeric CSV input and round-trip-exact numeric output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use scalemix::DenseMatrix;

use crate::CliError;

/// A rectangular table of finite numbers read from a headerless CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn into_matrix(self, path: &Path) -> Result<DenseMatrix, CliError> {
        DenseMatrix::from_rows(&self.rows).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    /// Accepts either a single column or a single row.
    pub fn into_vector(self, path: &Path) -> Result<Vec<f64>, CliError> {
        if self.n_cols() == 1 {
            Ok(self.rows.into_iter().map(|r| r[0]).collect())
        } else if self.n_rows() == 1 {
            Ok(self.rows.into_iter().next().unwrap_or_default())
        } else {
            Err(CliError::input(format!(
                "{}: expected a single row or column, found {}×{}",
                path.display(),
                self.n_rows(),
                self.n_cols()
            )))
        }
    }
}

/// Reads a headerless numeric CSV. Every row must have the same number of
/// fields; rows are reported 1-based.
pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let file = File::open(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| CliError::input(format!("{}: row {row}: {e}", path.display())))?;
        if let Some(first) = rows.first() {
            if record.len() != first.len() {
                return Err(CliError::input(format!(
                    "{}: row {row}: expected {} fields, found {}",
                    path.display(),
                    first.len(),
                    record.len()
                )));
            }
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(j, field)| match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CliError::input(format!(
                    "{}: row {row}, field {}: not a finite number: `{field}`",
                    path.display(),
                    j + 1
                ))),
            })
            .collect::<Result<Vec<f64>, CliError>>()?;
        rows.push(values);
    }
    if rows.is_empty() || rows[0].is_empty() {
        return Err(CliError::input(format!("{}: no data", path.display())));
    }
    Ok(Table { rows })
}

/// Formats a number with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Joins numbers into one comma-separated line without a newline.
pub fn join_nums(values: &[f64]) -> String {
    values.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(",")
}

/// Buffered output file; every line written through it ends with `\n`.
pub struct OutFile {
    path: String,
    inner: BufWriter<File>,
}

impl OutFile {
    pub fn create(path: &Path) -> Result<Self, CliError> {
        let file = File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        Ok(Self {
            path: path.display().to_string(),
            inner: BufWriter::new(file),
        })
    }

    pub fn line(&mut self, text: &str) -> Result<(), CliError> {
        writeln!(self.inner, "{text}").map_err(|e| CliError::input(format!("{}: {e}", self.path)))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.inner
            .flush()
            .map_err(|e| CliError::input(format!("{}: {e}", self.path)))
    }
}
