//! Tabular results and their CSV form.

use std::io::Write;
use std::path::Path;

use crate::error::CliError;

/// Named columns of numbers, one row per grid point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepResult {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        SweepResult {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn is_rectangular(&self) -> bool {
        self.rows.iter().all(|r| r.len() == self.columns.len())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Equality that also distinguishes NaN payloads and signed zeros.
    pub fn bit_eq(&self, other: &SweepResult) -> bool {
        self.columns == other.columns
            && self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
            })
    }
}

/// Header plus one line per row, LF endings, shortest round-trip numbers.
pub fn emit_csv<W: Write>(result: &SweepResult, out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(&result.columns)?;
    for row in &result.rows {
        w.write_record(row.iter().map(|v| format!("{v:?}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(result: &SweepResult) -> String {
    let mut buf = Vec::new();
    emit_csv(result, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<(), CliError> {
    let io = |source: std::io::Error| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io)?;
    emit_csv(result, std::io::BufWriter::new(file)).map_err(|e| io(e.into()))
}

pub fn parse_csv(text: &str) -> Result<SweepResult, csv::Error> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let columns = r.headers()?.iter().map(str::to_string).collect();
    let mut result = SweepResult {
        columns,
        rows: Vec::new(),
    };
    for record in r.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    csv::Error::from(std::io::Error::new(
                        std::io::ErrorKind::InvalidData,
                        format!("not a number: {field}"),
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        result.rows.push(row);
    }
    Ok(result)
}
