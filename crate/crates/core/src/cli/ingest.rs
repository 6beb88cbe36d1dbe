// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Trim};
use thiserror::Error;

use crate::penalty::Series;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}: cannot parse {cell:?} as a number")]
    NotNumeric { row: u64, cell: String },

    #[error("row {row}: no column {column}")]
    MissingCell { row: u64, column: usize },

    #[error("column {0:?} not found in header")]
    UnknownColumn(String),

    #[error("no data rows")]
    Empty,

    #[error("row {row}: {source}")]
    Invalid { row: u64, source: crate::error::SegError },
}

/// Which column to read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl ColumnSelector {
    /// Integers select by 0-based index; anything else selects by header name.
    pub fn parse(s: &str) -> Self {
        match s.trim().parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.trim().to_owned()),
        }
    }
}

/// Reads one numeric column from a CSV file (`-` reads standard input).
///
/// The first row is a header when a column is selected by name, or when any
/// of its cells is not a number. Blank lines are skipped; row numbers in
/// errors are 1-based line numbers.
pub fn ingest(path: &Path, column: Option<&ColumnSelector>) -> Result<Series, IngestError> {
    let io_err = |source| IngestError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut text = String::new();
    if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map_err(io_err)?;
    } else {
        File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(io_err)?;
    }
    parse_csv(&text, column)
}

pub fn parse_csv(text: &str, column: Option<&ColumnSelector>) -> Result<Series, IngestError> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(text.as_bytes());

    let mut records = reader.records().peekable();
    let mut index = match column {
        Some(ColumnSelector::Index(i)) => Some(*i),
        _ => None,
    };

    // Header detection on the first non-blank row.
    let first = loop {
        match records.peek() {
            Some(Ok(r)) if is_blank(r) => {
                records.next();
            }
            Some(Ok(r)) => break Some(r.clone()),
            Some(Err(_)) => {
                return Err(records.next().expect("peeked").unwrap_err().into());
            }
            None => break None,
        }
    };
    let Some(first) = first else {
        return Err(IngestError::Empty);
    };
    let has_header = matches!(column, Some(ColumnSelector::Name(_)))
        || first.iter().any(|cell| cell.parse::<f64>().is_err());
    if has_header {
        if let Some(ColumnSelector::Name(name)) = column {
            index = Some(
                first
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| IngestError::UnknownColumn(name.clone()))?,
            );
        }
        records.next();
    }
    let index = index.unwrap_or(0);

    let mut points = Vec::new();
    for record in records {
        let record = record?;
        if is_blank(&record) {
            continue;
        }
        let row = record.position().map_or(0, |p| p.line());
        let cell = record
            .get(index)
            .ok_or(IngestError::MissingCell { row, column: index })?;
        let value: f64 = cell.parse().map_err(|_| IngestError::NotNumeric {
            row,
            cell: cell.to_owned(),
        })?;
        if !value.is_finite() {
            return Err(IngestError::Invalid {
                row,
                source: crate::error::SegError::NonFinite {
                    index: points.len(),
                    value,
                },
            });
        }
        points.push(value);
    }
    Series::new(points).map_err(|_| IngestError::Empty)
}

fn is_blank(record: &StringRecord) -> bool {
    record.iter().all(str::is_empty)
}
