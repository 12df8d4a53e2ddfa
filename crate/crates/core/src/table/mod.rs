//! Typed, immutable columnar tables.
//!
//! A [`Table`] owns its columns behind `Arc`, so every transformation returns a
//! new table that shares the untouched columns with its parent. Each derived
//! table carries the parent's provenance plus one entry per operation applied.

mod csv_io;
mod infer;
mod profile;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{ingest_csv, read_csv, write_csv, CsvOptions};
pub use infer::{format_datetime, format_number, infer_kind, parse_cells, MissingTokens};
pub use profile::{encode_target_numeric, pearson_abs, profile, ColumnProfile, Schema};
pub(crate) use profile::Moments;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Boolean,
    Datetime,
    Text,
}

impl ColumnKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnKind::Numeric => "numeric",
            ColumnKind::Categorical => "categorical",
            ColumnKind::Boolean => "boolean",
            ColumnKind::Datetime => "datetime",
            ColumnKind::Text => "text",
        }
    }

    /// Categorical and text columns hold strings.
    pub fn is_string(self) -> bool {
        matches!(self, ColumnKind::Categorical | ColumnKind::Text)
    }
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Cell storage. `None` is the missing marker, distinct from zero or "".
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<Option<f64>>),
    Categorical(Vec<Option<String>>),
    Boolean(Vec<Option<bool>>),
    /// Seconds since the Unix epoch.
    Datetime(Vec<Option<i64>>),
    Text(Vec<Option<String>>),
}

impl ColumnData {
    pub fn kind(&self) -> ColumnKind {
        match self {
            ColumnData::Numeric(_) => ColumnKind::Numeric,
            ColumnData::Categorical(_) => ColumnKind::Categorical,
            ColumnData::Boolean(_) => ColumnKind::Boolean,
            ColumnData::Datetime(_) => ColumnKind::Datetime,
            ColumnData::Text(_) => ColumnKind::Text,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical(v) | ColumnData::Text(v) => v.len(),
            ColumnData::Boolean(v) => v.len(),
            ColumnData::Datetime(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match self {
            ColumnData::Numeric(v) => v[row].is_none(),
            ColumnData::Categorical(v) | ColumnData::Text(v) => v[row].is_none(),
            ColumnData::Boolean(v) => v[row].is_none(),
            ColumnData::Datetime(v) => v[row].is_none(),
        }
    }

    /// Keeps the rows at `rows`, in that order.
    pub fn take(&self, rows: &[usize]) -> ColumnData {
        fn pick<T: Clone>(v: &[T], rows: &[usize]) -> Vec<T> {
            rows.iter().map(|&r| v[r].clone()).collect()
        }
        match self {
            ColumnData::Numeric(v) => ColumnData::Numeric(pick(v, rows)),
            ColumnData::Categorical(v) => ColumnData::Categorical(pick(v, rows)),
            ColumnData::Boolean(v) => ColumnData::Boolean(pick(v, rows)),
            ColumnData::Datetime(v) => ColumnData::Datetime(pick(v, rows)),
            ColumnData::Text(v) => ColumnData::Text(pick(v, rows)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    data: ColumnData,
}

impl Column {
    pub fn new(name: impl Into<String>, data: ColumnData) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidTable("column name must not be empty".into()));
        }
        Ok(Column { name, data })
    }

    pub fn numeric(name: impl Into<String>, values: Vec<Option<f64>>) -> Result<Self> {
        Column::new(name, ColumnData::Numeric(values))
    }

    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        values: impl IntoIterator<Item = Option<S>>,
    ) -> Result<Self> {
        Column::new(
            name,
            ColumnData::Categorical(values.into_iter().map(|v| v.map(Into::into)).collect()),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ColumnKind {
        self.data.kind()
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_missing(&self, row: usize) -> bool {
        self.data.is_missing(row)
    }

    pub fn missing_count(&self) -> usize {
        (0..self.len()).filter(|&r| self.is_missing(r)).count()
    }

    pub fn as_numeric(&self) -> Option<&[Option<f64>]> {
        match &self.data {
            ColumnData::Numeric(v) => Some(v),
            _ => None,
        }
    }

    /// Canonical text of one cell; `None` when missing.
    pub fn render(&self, row: usize) -> Option<String> {
        match &self.data {
            ColumnData::Numeric(v) => v[row].map(format_number),
            ColumnData::Categorical(v) | ColumnData::Text(v) => v[row].clone(),
            ColumnData::Boolean(v) => v[row].map(|b| b.to_string()),
            ColumnData::Datetime(v) => v[row].map(format_datetime),
        }
    }

    pub fn renamed(&self, name: impl Into<String>) -> Result<Column> {
        Column::new(name, self.data.clone())
    }
}

/// A typed table with an optional target column and an append-only
/// provenance trail.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<Arc<Column>>,
    n_rows: usize,
    target: Option<String>,
    provenance: Vec<String>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        Table::from_shared(columns.into_iter().map(Arc::new).collect(), None, Vec::new())
    }

    fn from_shared(
        columns: Vec<Arc<Column>>,
        target: Option<String>,
        provenance: Vec<String>,
    ) -> Result<Self> {
        let n_rows = columns.first().map_or(0, |c| c.len());
        let mut seen = HashSet::new();
        for col in &columns {
            if col.len() != n_rows {
                return Err(Error::InvalidTable(format!(
                    "column '{}' has {} rows, expected {}",
                    col.name(),
                    col.len(),
                    n_rows
                )));
            }
            if !seen.insert(col.name()) {
                return Err(Error::InvalidTable(format!(
                    "duplicate column name '{}'",
                    col.name()
                )));
            }
        }
        if let Some(t) = &target {
            if !seen.contains(t.as_str()) {
                return Err(Error::InvalidTable(format!("target column '{t}' not found")));
            }
        }
        Ok(Table {
            columns,
            n_rows,
            target,
            provenance,
        })
    }

    /// Builds a child table that inherits this table's provenance plus `entries`.
    pub fn derive(
        &self,
        columns: Vec<Arc<Column>>,
        entries: impl IntoIterator<Item = String>,
    ) -> Result<Table> {
        let mut provenance = self.provenance.clone();
        provenance.extend(entries);
        Table::from_shared(columns, self.target.clone(), provenance)
    }

    pub fn with_target(&self, target: Option<&str>) -> Result<Table> {
        Table::from_shared(
            self.columns.clone(),
            target.map(str::to_owned),
            self.provenance.clone(),
        )
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn target(&self) -> Option<&str> {
        self.target.as_deref()
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn columns(&self) -> impl Iterator<Item = &Column> + '_ {
        self.columns.iter().map(|c| c.as_ref())
    }

    pub fn shared_columns(&self) -> &[Arc<Column>] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns().find(|c| c.name() == name)
    }

    pub fn shared_column(&self, name: &str) -> Option<&Arc<Column>> {
        self.columns.iter().find(|c| c.name() == name)
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns().map(Column::name).collect()
    }

    pub fn is_target(&self, name: &str) -> bool {
        self.target.as_deref() == Some(name)
    }

    /// All columns except the target.
    pub fn features(&self) -> impl Iterator<Item = &Column> + '_ {
        self.columns().filter(move |c| !self.is_target(c.name()))
    }

    pub fn n_features(&self) -> usize {
        self.features().count()
    }

    /// Keeps the listed rows (in order) across every column.
    pub fn take_rows(&self, rows: &[usize], entry: String) -> Result<Table> {
        let columns = self
            .columns
            .iter()
            .map(|c| Arc::new(Column::new(c.name(), c.data().take(rows)).expect("name valid")))
            .collect();
        self.derive(columns, [entry])
    }

    /// Column values compared ignoring provenance.
    pub fn same_values(&self, other: &Table) -> bool {
        self.n_rows == other.n_rows
            && self.target == other.target
            && self.columns.len() == other.columns.len()
            && self
                .columns
                .iter()
                .zip(&other.columns)
                .all(|(a, b)| a.as_ref() == b.as_ref())
    }

    /// `(name, kind)` for every column, in order.
    pub fn schema_signature(&self) -> Vec<(String, ColumnKind)> {
        self.columns()
            .map(|c| (c.name().to_owned(), c.kind()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_columns() {
        let a = Column::numeric("a", vec![Some(1.0), Some(2.0)]).unwrap();
        let b = Column::numeric("b", vec![Some(1.0)]).unwrap();
        assert!(matches!(Table::new(vec![a, b]), Err(Error::InvalidTable(_))));
    }

    #[test]
    fn rejects_duplicate_and_empty_names() {
        let a = Column::numeric("a", vec![Some(1.0)]).unwrap();
        assert!(Table::new(vec![a.clone(), a]).is_err());
        assert!(Column::numeric("", vec![]).is_err());
    }

    #[test]
    fn target_must_exist() {
        let a = Column::numeric("a", vec![Some(1.0)]).unwrap();
        let t = Table::new(vec![a]).unwrap();
        assert!(t.with_target(Some("y")).is_err());
        assert_eq!(t.with_target(Some("a")).unwrap().n_features(), 0);
    }

    #[test]
    fn provenance_only_grows() {
        let a = Column::numeric("a", vec![Some(1.0), Some(2.0)]).unwrap();
        let t = Table::new(vec![a]).unwrap();
        let t1 = t.take_rows(&[1], "keep row 1".into()).unwrap();
        let t2 = t1.take_rows(&[0], "keep row 0".into()).unwrap();
        assert_eq!(t2.provenance(), &["keep row 1", "keep row 0"]);
        assert_eq!(t.provenance().len(), 0);
    }
}
