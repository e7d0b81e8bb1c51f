//! Reading one numeric column of a CSV file as a stream.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Which CSV column holds the values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Index(usize),
    /// Requires a header line.
    Name(String),
}

impl Default for Column {
    fn default() -> Self {
        Column::Index(0)
    }
}

/// Lazily parsed values of one column. A first line whose selected cell is
/// not a number is taken as a header.
pub struct CsvStream<R: Read> {
    reader: csv::Reader<R>,
    record: csv::StringRecord,
    path: PathBuf,
    column: Column,
    index: Option<usize>,
    first: bool,
}

pub fn read_csv_stream(path: impl AsRef<Path>, column: Column) -> Result<CsvStream<File>> {
    let path = path.as_ref();
    let file = File::open(path)?;
    Ok(CsvStream::new(file, path, column))
}

impl<R: Read> CsvStream<R> {
    pub fn new(input: R, path: impl AsRef<Path>, column: Column) -> Self {
        let reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(input);
        let index = match column {
            Column::Index(i) => Some(i),
            Column::Name(_) => None,
        };
        Self { reader, record: csv::StringRecord::new(), path: path.as_ref().to_path_buf(), column, index, first: true }
    }

    fn parse_error(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse { path: self.path.clone(), line, msg: msg.into() }
    }

    fn next_value(&mut self) -> Result<Option<f64>> {
        loop {
            match self.reader.read_record(&mut self.record) {
                Ok(true) => {}
                Ok(false) => return Ok(None),
                Err(e) => {
                    let line = e.position().map_or(0, |p| p.line() as usize);
                    return Err(self.parse_error(line, e.to_string()));
                }
            }
            let line = self.record.position().map_or(0, |p| p.line() as usize);
            if self.record.iter().all(str::is_empty) {
                continue;
            }
            let first = std::mem::replace(&mut self.first, false);
            if first {
                if let Column::Name(name) = &self.column {
                    let idx = self.record.iter().position(|h| h == name);
                    self.index = Some(idx.ok_or_else(|| self.parse_error(line, format!("no column named `{name}`")))?);
                    continue;
                }
            }
            let idx = self.index.expect("column resolved");
            let cell = self
                .record
                .get(idx)
                .ok_or_else(|| self.parse_error(line, format!("missing column {idx}")))?;
            match cell.parse::<f64>() {
                Ok(v) => return Ok(Some(v)),
                Err(_) if first => continue,
                Err(_) => return Err(self.parse_error(line, format!("`{cell}` is not a number"))),
            }
        }
    }
}

impl<R: Read> Iterator for CsvStream<R> {
    type Item = Result<f64>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_value().transpose()
    }
}
