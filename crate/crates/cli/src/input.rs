use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use hdlrt::DataMatrix;

#[derive(Debug)]
pub enum InputError {
    Io(std::io::Error),
    /// 1-based row and column of an entry that is not a finite number.
    Parse {
        row: usize,
        col: usize,
        value: String,
    },
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    Empty,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Io(e) => write!(f, "{e}"),
            InputError::Parse { row, col, value } => {
                write!(
                    f,
                    "row {row}, column {col}: `{value}` is not a finite number"
                )
            }
            InputError::RaggedRows {
                row,
                expected,
                found,
            } => {
                write!(f, "row {row} has {found} fields, expected {expected}")
            }
            InputError::Empty => f.write_str("no data rows"),
        }
    }
}

impl std::error::Error for InputError {}

impl From<csv::Error> for InputError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => InputError::Io(io),
            other => InputError::Io(std::io::Error::other(format!("{other:?}"))),
        }
    }
}

pub fn parse_csv(path: &Path) -> Result<DataMatrix, InputError> {
    parse_reader(File::open(path).map_err(InputError::Io)?)
}

/// Rows are observations, columns variables. A first row containing any
/// non-numeric field is taken as a header.
pub fn parse_reader(reader: impl Read) -> Result<DataMatrix, InputError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i + 1, |pos| pos.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<Option<f64>> = record
            .iter()
            .map(|v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect();
        if i == 0 && parsed.iter().any(Option::is_none) {
            continue;
        }
        let expected = *width.get_or_insert(parsed.len());
        if parsed.len() != expected {
            return Err(InputError::RaggedRows {
                row: line,
                expected,
                found: parsed.len(),
            });
        }
        for (j, v) in parsed.into_iter().enumerate() {
            values.push(v.ok_or_else(|| InputError::Parse {
                row: line,
                col: j + 1,
                value: record[j].to_string(),
            })?);
        }
        rows += 1;
    }
    let p = width.ok_or(InputError::Empty)?;
    Ok(DataMatrix::from_row_major(rows, p, values).expect("rectangular finite data"))
}
