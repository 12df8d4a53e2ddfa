use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use super::infer::{infer_kind, parse_cells, MissingTokens};
use super::{Column, Table};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub has_header: bool,
    pub missing: MissingTokens,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            has_header: true,
            missing: MissingTokens::default(),
        }
    }
}

/// Reads a CSV file into a typed table. Kinds are inferred per column.
pub fn ingest_csv(path: &Path, options: &CsvOptions) -> Result<Table> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase) {
        Some(ext) if matches!(ext.as_str(), "parquet" | "hdf" | "h5" | "hdf5") => {
            return Err(Error::UnsupportedFormat(ext));
        }
        _ => {}
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, options)
}

pub fn read_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);

    let mut records = rdr.records();
    let first = match records.next() {
        Some(r) => r.map_err(|e| Error::Csv(e.to_string()))?,
        None => return Err(Error::EmptyInput("file has no rows".into())),
    };
    let width = first.len();

    let (names, mut rows): (Vec<String>, Vec<Vec<String>>) = if options.has_header {
        let names = first
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let n = n.trim();
                if n.is_empty() {
                    format!("col_{i}")
                } else {
                    n.to_owned()
                }
            })
            .collect();
        (names, Vec::new())
    } else {
        (
            (0..width).map(|i| format!("col_{i}")).collect(),
            vec![first.iter().map(str::to_owned).collect()],
        )
    };

    for rec in records {
        let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
        if rec.len() != width {
            let line = rec.position().map_or(0, |p| p.line());
            return Err(Error::RaggedRow {
                line,
                expected: width,
                found: rec.len(),
            });
        }
        rows.push(rec.iter().map(str::to_owned).collect());
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("file has no data rows".into()));
    }

    let mut columns = Vec::with_capacity(width);
    for (j, name) in names.into_iter().enumerate() {
        let raw: Vec<&str> = rows.iter().map(|r| r[j].as_str()).collect();
        let kind = infer_kind(&raw, &options.missing);
        columns.push(Column::new(name, parse_cells(&raw, kind, &options.missing))?);
    }
    Table::new(columns)
}

/// Writes the table as RFC-4180 CSV with a header row. Missing cells are
/// empty fields.
pub fn write_csv(table: &Table, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(table, file, b',').map_err(|e| match e {
        Error::Csv(msg) => Error::io(path, std::io::Error::other(msg)),
        other => other,
    })
}

pub(crate) fn write_csv_to<W: Write>(table: &Table, out: W, delimiter: u8) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(out);
    let csv_err = |e: csv::Error| Error::Csv(e.to_string());
    w.write_record(table.column_names()).map_err(csv_err)?;
    let cols: Vec<&Arc<Column>> = table.shared_columns().iter().collect();
    let mut row = Vec::with_capacity(cols.len());
    for r in 0..table.n_rows() {
        row.clear();
        row.extend(cols.iter().map(|c| c.render(r).unwrap_or_default()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}
