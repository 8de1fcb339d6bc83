//! Wide-format CSV ingestion: a header row, then one row per subject with one
//! numeric column per condition.

use std::io::Read;
use std::path::Path;

use rmbayes_core::{DataMatrix, Error as CoreError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected {expected} columns, found {found}")]
    Ragged {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: {value:?} is not a finite number")]
    NonNumeric {
        line: u64,
        column: usize,
        value: String,
    },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("{0}")]
    Data(#[from] CoreError),
}

impl InputError {
    pub fn is_io(&self) -> bool {
        matches!(self, InputError::Io { .. })
    }
}

/// Column headers and the subject-by-condition matrix.
#[derive(Debug, Clone)]
pub struct WideTable {
    pub conditions: Vec<String>,
    pub data: DataMatrix,
}

pub fn read_wide_csv_path(path: &Path) -> Result<WideTable, InputError> {
    let file = std::fs::File::open(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_wide_csv(file)
}

pub fn read_wide_csv<R: Read>(reader: R) -> Result<WideTable, InputError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let conditions: Vec<String> = rdr
        .headers()
        .map_err(|e| InputError::Csv(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let k = conditions.len();

    let mut values = Vec::new();
    let mut subjects = 0;
    for record in rdr.records() {
        let record = record.map_err(|e| InputError::Csv(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != k {
            return Err(InputError::Ragged {
                line,
                expected: k,
                found: record.len(),
            });
        }
        for (column, cell) in record.iter().enumerate() {
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(InputError::NonNumeric {
                        line,
                        column: column + 1,
                        value: cell.to_owned(),
                    })
                }
            }
        }
        subjects += 1;
    }
    let data = DataMatrix::new(subjects, k, values)?;
    Ok(WideTable { conditions, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_wide_rows() {
        let t = read_wide_csv("a,b\n1,2\n2,4\n3, 3\n".as_bytes()).unwrap();
        assert_eq!(t.conditions, ["a", "b"]);
        assert_eq!(t.data.subjects(), 3);
        assert_eq!(t.data.row(2), &[3.0, 3.0]);
    }

    #[test]
    fn rejects_ragged_and_non_numeric() {
        let e = read_wide_csv("a,b\n1,2\n3\n".as_bytes()).unwrap_err();
        assert!(matches!(e, InputError::Ragged { line: 3, .. }), "{e}");
        let e = read_wide_csv("a,b\n1,2\n3,x\n".as_bytes()).unwrap_err();
        assert!(matches!(e, InputError::NonNumeric { column: 2, .. }), "{e}");
        let e = read_wide_csv("a,b\n1,2\n3,NaN\n".as_bytes()).unwrap_err();
        assert!(matches!(e, InputError::NonNumeric { .. }), "{e}");
    }

    #[test]
    fn rejects_too_small_designs() {
        let e = read_wide_csv("a,b\n1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(e, InputError::Data(CoreError::Dimension { .. })));
        let e = read_wide_csv("a\n1\n2\n".as_bytes()).unwrap_err();
        assert!(matches!(e, InputError::Data(CoreError::Dimension { .. })));
    }
}
