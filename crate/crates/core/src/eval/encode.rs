use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::routing::TaskKind;
use crate::table::{encode_target_numeric, ColumnData, Table};

/// Dense row-major design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<f64>,
    pub names: Vec<String>,
}

impl Matrix {
    pub fn from_columns(names: Vec<String>, columns: Vec<Vec<f64>>) -> Matrix {
        let n_rows = columns.first().map_or(0, Vec::len);
        let n_cols = columns.len();
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in 0..n_rows {
            for c in &columns {
                data.push(c[r]);
            }
        }
        Matrix {
            n_rows,
            n_cols,
            data,
            names,
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Matrix {
        let n_cols = rows.first().map_or(0, Vec::len);
        Matrix {
            n_rows: rows.len(),
            n_cols,
            data: rows.iter().flatten().copied().collect(),
            names: (0..n_cols).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> Vec<&[f64]> {
        (0..self.n_rows).map(|i| self.row(i)).collect()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n_cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.n_rows).map(|r| self.get(r, c)).collect()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.n_cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            n_rows: rows.len(),
            n_cols: self.n_cols,
            data,
            names: self.names.clone(),
        }
    }
}

/// Label vector for the routed task.
#[derive(Debug, Clone, PartialEq)]
pub enum Labels {
    /// Class indices with the class names in index order.
    Classes { y: Vec<usize>, classes: Vec<String> },
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub x: Matrix,
    pub labels: Option<Labels>,
}

/// Turns a cleaned table into a numeric matrix.
///
/// Numeric columns pass through, booleans become 0/1 and categoricals are
/// one-hot encoded with categories in lexicographic order. Text and datetime
/// columns are left out. Rows with a missing label are dropped; any remaining
/// missing cell (uncleaned input) takes its column mean.
pub fn encode_features(table: &Table, task: TaskKind) -> Result<Encoded> {
    let target = match (task, table.target()) {
        (TaskKind::Unsupervised, _) | (_, None) => None,
        (_, Some(t)) => table.column(t),
    };
    if task != TaskKind::Unsupervised && target.is_none() {
        return Err(Error::Evaluation(format!(
            "{task} evaluation needs a target column"
        )));
    }

    let (keep, labels) = match target {
        None => ((0..table.n_rows()).collect::<Vec<_>>(), None),
        Some(col) => {
            let keep: Vec<usize> = (0..table.n_rows()).filter(|&r| !col.is_missing(r)).collect();
            let labels = if task == TaskKind::Classification {
                class_labels(col.data(), &keep)
            } else {
                let v = encode_target_numeric(col).ok_or_else(|| {
                    Error::Evaluation(format!("target '{}' has no numeric encoding", col.name()))
                })?;
                Labels::Values(keep.iter().map(|&r| v[r].expect("present")).collect())
            };
            (keep, Some(labels))
        }
    };

    let mut names = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for col in table.features() {
        match col.data() {
            ColumnData::Numeric(v) => {
                names.push(col.name().to_owned());
                columns.push(fill(keep.iter().map(|&r| v[r])));
            }
            ColumnData::Boolean(v) => {
                names.push(col.name().to_owned());
                columns.push(fill(keep.iter().map(|&r| v[r].map(|b| b as u8 as f64))));
            }
            ColumnData::Categorical(v) => {
                let levels: BTreeSet<&str> =
                    keep.iter().filter_map(|&r| v[r].as_deref()).collect();
                for level in levels {
                    names.push(format!("{}={level}", col.name()));
                    columns.push(
                        keep.iter()
                            .map(|&r| (v[r].as_deref() == Some(level)) as u8 as f64)
                            .collect(),
                    );
                }
            }
            ColumnData::Text(_) | ColumnData::Datetime(_) => {}
        }
    }
    if columns.is_empty() {
        return Err(Error::Evaluation("no usable feature columns".into()));
    }
    Ok(Encoded {
        x: Matrix::from_columns(names, columns),
        labels,
    })
}

fn fill(values: impl Iterator<Item = Option<f64>>) -> Vec<f64> {
    let v: Vec<Option<f64>> = values.collect();
    let present: Vec<f64> = v.iter().flatten().copied().collect();
    let mean = if present.is_empty() {
        0.0
    } else {
        present.iter().sum::<f64>() / present.len() as f64
    };
    v.into_iter().map(|x| x.unwrap_or(mean)).collect()
}

fn class_labels(data: &ColumnData, keep: &[usize]) -> Labels {
    // numbers sort numerically, everything else by its text
    let keys: Vec<(Option<f64>, String)> = keep
        .iter()
        .map(|&r| match data {
            ColumnData::Numeric(v) => {
                let x = v[r].expect("present") + 0.0;
                (Some(x), crate::table::format_number(x))
            }
            ColumnData::Boolean(v) => (None, v[r].expect("present").to_string()),
            ColumnData::Datetime(v) => (
                Some(v[r].expect("present") as f64),
                crate::table::format_datetime(v[r].expect("present")),
            ),
            ColumnData::Categorical(v) | ColumnData::Text(v) => {
                (None, v[r].clone().expect("present"))
            }
        })
        .collect();
    let mut distinct: Vec<(Option<f64>, String)> = keys.clone();
    distinct.sort_by(|a, b| match (a.0, b.0) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        _ => a.1.cmp(&b.1),
    });
    distinct.dedup_by(|a, b| a.1 == b.1);
    let classes: Vec<String> = distinct.into_iter().map(|k| k.1).collect();
    let index: HashMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let y = keys.iter().map(|k| index[k.1.as_str()]).collect();
    Labels::Classes { y, classes }
}
