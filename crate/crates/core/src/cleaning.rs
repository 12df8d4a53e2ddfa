//! Preset cleaning pipelines run before routing.
//!
//! Every mode leaves feature columns with no missing cells and records each
//! step with exact counts. Target cells are never rewritten; rows whose target
//! is missing are dropped instead.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{
    infer_kind, parse_cells, Column, ColumnData, ColumnKind, MissingTokens, Table,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CleaningMode {
    Light,
    Aggressive,
    #[serde(rename = "timeseries")]
    TimeSeries,
}

impl CleaningMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CleaningMode::Light => "light",
            CleaningMode::Aggressive => "aggressive",
            CleaningMode::TimeSeries => "timeseries",
        }
    }
}

impl fmt::Display for CleaningMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CleaningMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "light" => Ok(CleaningMode::Light),
            "aggressive" => Ok(CleaningMode::Aggressive),
            "timeseries" | "time-series" => Ok(CleaningMode::TimeSeries),
            other => Err(Error::Config(format!("unknown cleaning mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningStep {
    pub name: String,
    pub columns: Vec<String>,
    pub cells_changed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub mode: CleaningMode,
    pub steps: Vec<CleaningStep>,
    pub columns_dropped: Vec<String>,
    pub rows_dropped: usize,
}

#[derive(Debug, Clone)]
pub struct CleanOptions {
    pub mode: CleaningMode,
    pub time_column: Option<String>,
    pub missing: MissingTokens,
}

impl CleanOptions {
    pub fn new(mode: CleaningMode) -> Self {
        CleanOptions {
            mode,
            time_column: None,
            missing: MissingTokens::default(),
        }
    }
}

/// Linear-interpolation percentile at rank `p * (n - 1)` of the sorted values.
pub fn percentile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Cleaning("percentile of an empty sequence".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Cleaning(format!("percentile rank {p} outside [0, 1]")));
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(percentile_sorted(&s, p))
}

fn percentile_sorted(s: &[f64], p: f64) -> f64 {
    let h = p * (s.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

struct Work {
    columns: Vec<Column>,
    target: Option<String>,
    mode: CleaningMode,
    report: CleaningReport,
    provenance: Vec<String>,
}

impl Work {
    fn step(&mut self, name: &str, columns: Vec<String>, cells_changed: usize) {
        self.provenance.push(format!(
            "clean[{}] {name}: {} column(s), {cells_changed} cell(s)",
            self.mode,
            columns.len()
        ));
        self.report.steps.push(CleaningStep {
            name: name.to_owned(),
            columns,
            cells_changed,
        });
    }

    fn is_target(&self, name: &str) -> bool {
        self.target.as_deref() == Some(name)
    }

    fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    fn take_rows(&mut self, rows: &[usize]) {
        for c in &mut self.columns {
            *c = Column::new(c.name(), c.data().take(rows)).expect("existing name");
        }
    }

    fn drop_where(&mut self, step: &str, pred: impl Fn(usize, &Column) -> bool) {
        let n_rows = self.n_rows();
        let (drop, keep): (Vec<Column>, Vec<Column>) = std::mem::take(&mut self.columns)
            .into_iter()
            .partition(|c| !self.is_target(c.name()) && pred(n_rows, c));
        self.columns = keep;
        let names: Vec<String> = drop.iter().map(|c| c.name().to_owned()).collect();
        let cells = drop.iter().map(Column::len).sum();
        self.report.columns_dropped.extend(names.iter().cloned());
        self.step(step, names, cells);
    }
}

/// Cleans `table` under the configured mode.
pub fn clean(table: &Table, opts: &CleanOptions) -> Result<(Table, CleaningReport)> {
    if table.n_rows() == 0 || table.n_cols() == 0 {
        return Err(Error::Cleaning("table is empty".into()));
    }
    if opts.mode == CleaningMode::TimeSeries {
        let name = opts
            .time_column
            .as_deref()
            .ok_or_else(|| Error::Cleaning("timeseries mode requires a time column".into()))?;
        match table.column(name).map(Column::kind) {
            Some(ColumnKind::Datetime | ColumnKind::Numeric) => {}
            Some(k) => {
                return Err(Error::Cleaning(format!(
                    "time column '{name}' is {k}, expected datetime or numeric"
                )))
            }
            None => return Err(Error::Cleaning(format!("time column '{name}' not found"))),
        }
    }

    let mut w = Work {
        columns: table.columns().cloned().collect(),
        target: table.target().map(str::to_owned),
        mode: opts.mode,
        report: CleaningReport {
            mode: opts.mode,
            steps: Vec::new(),
            columns_dropped: Vec::new(),
            rows_dropped: 0,
        },
        provenance: Vec::new(),
    };

    trim_whitespace(&mut w);
    correct_types(&mut w, &opts.missing);
    drop_missing_target_rows(&mut w)?;
    w.drop_where("drop_empty_columns", |n, c| c.missing_count() == n);

    match opts.mode {
        CleaningMode::Light => impute(&mut w)?,
        CleaningMode::Aggressive => {
            w.drop_where("drop_sparse_columns", |n, c| {
                c.missing_count() as f64 / n as f64 > 0.5
            });
            impute(&mut w)?;
            w.drop_where("drop_constant_columns", |_, c| distinct_present(c) <= 1);
            winsorize_and_dedupe(&mut w);
        }
        CleaningMode::TimeSeries => {
            let time = opts.time_column.as_deref().expect("checked above");
            if !w.columns.iter().any(|c| c.name() == time) {
                return Err(Error::Cleaning(format!(
                    "time column '{time}' was dropped as entirely missing"
                )));
            }
            sort_by_time(&mut w, time);
            fill_series(&mut w);
        }
    }

    let n_features = w.columns.iter().filter(|c| !w.is_target(c.name())).count();
    if n_features == 0 {
        return Err(Error::Cleaning("no feature columns left after cleaning".into()));
    }

    let columns = w.columns.into_iter().map(Arc::new).collect();
    let cleaned = table.derive(columns, w.provenance)?;
    Ok((cleaned, w.report))
}

fn distinct_present(col: &Column) -> usize {
    (0..col.len())
        .filter_map(|r| col.render(r))
        .collect::<HashSet<_>>()
        .len()
}

fn trim_whitespace(w: &mut Work) {
    let mut affected = Vec::new();
    let mut changed = 0;
    for i in 0..w.columns.len() {
        if w.is_target(w.columns[i].name()) {
            continue;
        }
        let col = &w.columns[i];
        let (values, is_text) = match col.data() {
            ColumnData::Categorical(v) => (v, false),
            ColumnData::Text(v) => (v, true),
            _ => continue,
        };
        let mut n = 0;
        let trimmed: Vec<Option<String>> = values
            .iter()
            .map(|c| {
                c.as_ref().map(|s| {
                    let t = s.trim();
                    if t.len() != s.len() {
                        n += 1;
                    }
                    t.to_owned()
                })
            })
            .collect();
        if n > 0 {
            let data = if is_text {
                ColumnData::Text(trimmed)
            } else {
                ColumnData::Categorical(trimmed)
            };
            affected.push(col.name().to_owned());
            w.columns[i] = Column::new(col.name(), data).expect("existing name");
            changed += n;
        }
    }
    w.step("trim_whitespace", affected, changed);
}

/// Re-infers string columns so numbers, booleans and dates stored as text get
/// their proper kind. Only promotions out of Categorical/Text happen here; the
/// target is converted only when no present cell would be lost.
fn correct_types(w: &mut Work, missing: &MissingTokens) {
    let mut affected = Vec::new();
    let mut changed = 0;
    for i in 0..w.columns.len() {
        let col = &w.columns[i];
        if !col.kind().is_string() {
            continue;
        }
        let raw: Vec<String> = (0..col.len())
            .map(|r| col.render(r).unwrap_or_else(|| missing_marker(missing)))
            .collect();
        let inferred = infer_kind(&raw, missing);
        let new_kind = if inferred.is_string() { col.kind() } else { inferred };
        let data = parse_cells(&raw, new_kind, missing);
        let lost = (0..col.len())
            .filter(|&r| data.is_missing(r) && !col.is_missing(r))
            .count();
        if w.is_target(col.name()) && lost > 0 {
            continue;
        }
        if new_kind != col.kind() || lost > 0 {
            affected.push(col.name().to_owned());
            changed += lost;
            w.columns[i] = Column::new(col.name(), data).expect("existing name");
        }
    }
    w.step("type_correction", affected, changed);
}

fn missing_marker(missing: &MissingTokens) -> String {
    missing.tokens().first().cloned().unwrap_or_default()
}

fn drop_missing_target_rows(w: &mut Work) -> Result<()> {
    let Some(target) = w.target.clone() else {
        return Ok(());
    };
    let col = w
        .columns
        .iter()
        .find(|c| c.name() == target)
        .expect("target exists");
    let keep: Vec<usize> = (0..col.len()).filter(|&r| !col.is_missing(r)).collect();
    let dropped = col.len() - keep.len();
    if keep.is_empty() {
        return Err(Error::Cleaning(format!("target '{target}' has no values")));
    }
    if dropped > 0 {
        w.take_rows(&keep);
    }
    w.report.rows_dropped += dropped;
    w.step("drop_missing_target_rows", vec![target], dropped);
    Ok(())
}

fn impute(w: &mut Work) -> Result<()> {
    let mut affected = Vec::new();
    let mut changed = 0;
    for i in 0..w.columns.len() {
        let col = &w.columns[i];
        let n_missing = col.missing_count();
        if n_missing == 0 || w.is_target(col.name()) {
            continue;
        }
        let data = match col.data() {
            ColumnData::Numeric(v) => {
                let present: Vec<f64> = v.iter().flatten().copied().collect();
                let med = percentile(&present, 0.5)?;
                ColumnData::Numeric(v.iter().map(|x| Some(x.unwrap_or(med))).collect())
            }
            ColumnData::Datetime(v) => {
                let present: Vec<f64> = v.iter().flatten().map(|&d| d as f64).collect();
                let med = percentile(&present, 0.5)?.round() as i64;
                ColumnData::Datetime(v.iter().map(|x| Some(x.unwrap_or(med))).collect())
            }
            ColumnData::Boolean(v) => {
                let m = mode_of(v.iter().flatten().copied());
                ColumnData::Boolean(v.iter().map(|x| x.or(m)).collect())
            }
            ColumnData::Categorical(v) => {
                let m = mode_of(v.iter().flatten().cloned());
                ColumnData::Categorical(v.iter().map(|x| x.clone().or_else(|| m.clone())).collect())
            }
            ColumnData::Text(v) => {
                let m = mode_of(v.iter().flatten().cloned());
                ColumnData::Text(v.iter().map(|x| x.clone().or_else(|| m.clone())).collect())
            }
        };
        affected.push(col.name().to_owned());
        changed += n_missing;
        w.columns[i] = Column::new(col.name(), data).expect("existing name");
    }
    w.step("impute", affected, changed);
    Ok(())
}

/// Most frequent value; ties go to the smallest value.
fn mode_of<T: Ord>(values: impl Iterator<Item = T>) -> Option<T> {
    let mut counts: BTreeMap<T, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    let best = counts.values().copied().max()?;
    counts.into_iter().find(|(_, c)| *c == best).map(|(v, _)| v)
}

/// Clips numeric features to their 1st/99th percentiles, then removes exact
/// duplicate rows, repeating until neither step changes anything.
///
/// Clip bounds are the interpolated percentiles rounded inward to the nearest
/// observed value, which makes a second pass over the same rows a no-op.
fn winsorize_and_dedupe(w: &mut Work) {
    let mut clipped_cols: Vec<String> = Vec::new();
    let mut clipped_cells = 0;
    let mut dup_rows = 0;
    loop {
        for i in 0..w.columns.len() {
            let col = &w.columns[i];
            if w.is_target(col.name()) {
                continue;
            }
            let Some(v) = col.as_numeric() else { continue };
            let mut s: Vec<f64> = v.iter().flatten().copied().collect();
            if s.len() < 2 {
                continue;
            }
            s.sort_by(f64::total_cmp);
            let last = (s.len() - 1) as f64;
            let lo = s[(0.01 * last).ceil() as usize];
            let hi = s[(0.99 * last).floor() as usize];
            if lo >= hi {
                continue;
            }
            let mut n = 0;
            let clipped: Vec<Option<f64>> = v
                .iter()
                .map(|x| {
                    x.map(|x| {
                        let c = x.clamp(lo, hi);
                        if c != x {
                            n += 1;
                        }
                        c
                    })
                })
                .collect();
            if n > 0 {
                if !clipped_cols.iter().any(|c| c == col.name()) {
                    clipped_cols.push(col.name().to_owned());
                }
                clipped_cells += n;
                w.columns[i] = Column::numeric(col.name(), clipped).expect("existing name");
            }
        }

        let mut seen = HashSet::new();
        let keep: Vec<usize> = (0..w.n_rows())
            .filter(|&r| {
                let key: Vec<Option<String>> = w.columns.iter().map(|c| c.render(r)).collect();
                seen.insert(key)
            })
            .collect();
        let removed = w.n_rows() - keep.len();
        if removed == 0 {
            break;
        }
        w.take_rows(&keep);
        dup_rows += removed;
    }
    w.step("winsorize", clipped_cols, clipped_cells);
    w.report.rows_dropped += dup_rows;
    w.step("drop_duplicate_rows", Vec::new(), dup_rows);
}

fn sort_by_time(w: &mut Work, time: &str) {
    let col = w.columns.iter().find(|c| c.name() == time).expect("checked");
    let key: Vec<Option<f64>> = match col.data() {
        ColumnData::Numeric(v) => v.clone(),
        ColumnData::Datetime(v) => v.iter().map(|d| d.map(|d| d as f64)).collect(),
        _ => unreachable!("time column kind checked"),
    };
    let mut order: Vec<usize> = (0..key.len()).collect();
    // stable: equal times keep input order, missing times go last
    order.sort_by(|&a, &b| match (key[a], key[b]) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    let moved = order.iter().enumerate().filter(|(i, &r)| *i != r).count();
    if moved > 0 {
        w.take_rows(&order);
    }
    w.step("sort_by_time", vec![time.to_owned()], moved);
}

fn fill_series(w: &mut Work) {
    fn fill<T: Clone>(v: &[Option<T>]) -> (Vec<Option<T>>, usize, usize) {
        let mut out = v.to_vec();
        let mut forward = 0;
        let mut last: Option<T> = None;
        for cell in out.iter_mut() {
            match cell {
                Some(x) => last = Some(x.clone()),
                None => {
                    if let Some(l) = &last {
                        *cell = Some(l.clone());
                        forward += 1;
                    }
                }
            }
        }
        let first = out.iter().flatten().next().cloned();
        let mut backward = 0;
        for cell in out.iter_mut() {
            if cell.is_some() {
                break;
            }
            *cell = first.clone();
            backward += 1;
        }
        (out, forward, backward)
    }

    let (mut ff_cols, mut bf_cols) = (Vec::new(), Vec::new());
    let (mut ff, mut bf) = (0, 0);
    for i in 0..w.columns.len() {
        let col = &w.columns[i];
        if w.is_target(col.name()) || col.missing_count() == 0 {
            continue;
        }
        let (data, f, b) = match col.data() {
            ColumnData::Numeric(v) => {
                let (o, f, b) = fill(v);
                (ColumnData::Numeric(o), f, b)
            }
            ColumnData::Categorical(v) => {
                let (o, f, b) = fill(v);
                (ColumnData::Categorical(o), f, b)
            }
            ColumnData::Text(v) => {
                let (o, f, b) = fill(v);
                (ColumnData::Text(o), f, b)
            }
            ColumnData::Boolean(v) => {
                let (o, f, b) = fill(v);
                (ColumnData::Boolean(o), f, b)
            }
            ColumnData::Datetime(v) => {
                let (o, f, b) = fill(v);
                (ColumnData::Datetime(o), f, b)
            }
        };
        if f > 0 {
            ff_cols.push(col.name().to_owned());
        }
        if b > 0 {
            bf_cols.push(col.name().to_owned());
        }
        ff += f;
        bf += b;
        w.columns[i] = Column::new(col.name(), data).expect("existing name");
    }
    w.step("forward_fill", ff_cols, ff);
    w.step("back_fill", bf_cols, bf);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::read_csv;
    use crate::table::CsvOptions;

    fn table(csv: &str) -> Table {
        read_csv(csv.as_bytes(), &CsvOptions::default()).unwrap()
    }

    fn num(t: &Table, name: &str) -> Vec<Option<f64>> {
        t.column(name).unwrap().as_numeric().unwrap().to_vec()
    }

    #[test]
    fn percentile_examples() {
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0], 0.5).unwrap(), 2.5);
        assert_eq!(percentile(&[4.0, -1.0, 9.0], 0.0).unwrap(), -1.0);
        assert_eq!(percentile(&[4.0, -1.0, 9.0], 1.0).unwrap(), 9.0);
        assert!(percentile(&[], 0.5).is_err());
        assert!(percentile(&[1.0], 1.5).is_err());
    }

    #[test]
    fn light_imputes_median() {
        let t = table("x,y\n1,a\nNA,b\n3,c\n");
        let (c, report) = clean(&t, &CleanOptions::new(CleaningMode::Light)).unwrap();
        assert_eq!(num(&c, "x"), vec![Some(1.0), Some(2.0), Some(3.0)]);
        let imp = report.steps.iter().find(|s| s.name == "impute").unwrap();
        assert_eq!(imp.cells_changed, 1);
    }

    #[test]
    fn light_trims_and_corrects_types() {
        let t = table("x,y\n\" 1\",a\n\"2 \",b\n3,c\n");
        assert_eq!(t.column("x").unwrap().kind(), ColumnKind::Categorical);
        let (c, _) = clean(&t, &CleanOptions::new(CleaningMode::Light)).unwrap();
        assert_eq!(num(&c, "x"), vec![Some(1.0), Some(2.0), Some(3.0)]);
    }

    #[test]
    fn categorical_mode_tie_is_lexicographic() {
        let t = table("c,x\nb,1\na,2\nNA,3\n");
        let (c, _) = clean(&t, &CleanOptions::new(CleaningMode::Light)).unwrap();
        assert_eq!(c.column("c").unwrap().render(2).as_deref(), Some("a"));
    }

    #[test]
    fn drops_rows_with_missing_target_and_empty_columns() {
        let t = table("x,e,y\n1,,0\n2,,NA\n3,,1\n")
            .with_target(Some("y"))
            .unwrap();
        let (c, report) = clean(&t, &CleanOptions::new(CleaningMode::Light)).unwrap();
        assert_eq!(c.n_rows(), 2);
        assert_eq!(report.rows_dropped, 1);
        assert_eq!(report.columns_dropped, vec!["e".to_string()]);
        assert_eq!(num(&c, "y"), vec![Some(0.0), Some(1.0)]);
    }

    #[test]
    fn aggressive_drops_constant_and_sparse() {
        let t = table("k,s,x\n5,1,1\n5,NA,2\n5,NA,3\n5,NA,4\n");
        let (c, report) = clean(&t, &CleanOptions::new(CleaningMode::Aggressive)).unwrap();
        assert!(report.columns_dropped.contains(&"k".to_string()));
        assert!(report.columns_dropped.contains(&"s".to_string()));
        assert_eq!(c.column_names(), vec!["x"]);
    }

    #[test]
    fn aggressive_winsorizes_outlier() {
        let mut csv = String::from("x,z\n");
        for i in 0..200 {
            csv.push_str(&format!("{},{}\n", i, i % 7));
        }
        csv.push_str("100000,3\n");
        let t = table(&csv);
        let (c, _) = clean(&t, &CleanOptions::new(CleaningMode::Aggressive)).unwrap();
        let max = num(&c, "x").into_iter().flatten().fold(f64::MIN, f64::max);
        assert!(max < 1000.0);
    }

    #[test]
    fn aggressive_drops_duplicate_rows() {
        let t = table("x,y\n1,2\n1,2\n3,4\n");
        let (c, report) = clean(&t, &CleanOptions::new(CleaningMode::Aggressive)).unwrap();
        assert_eq!(c.n_rows(), 2);
        assert_eq!(report.rows_dropped, 1);
    }

    #[test]
    fn timeseries_fill() {
        let t = table("t,v\n1,NA\n2,5\n3,NA\n4,7\n");
        let mut opts = CleanOptions::new(CleaningMode::TimeSeries);
        opts.time_column = Some("t".into());
        let (c, _) = clean(&t, &opts).unwrap();
        assert_eq!(num(&c, "v"), vec![Some(5.0), Some(5.0), Some(5.0), Some(7.0)]);
    }

    #[test]
    fn timeseries_sorts_by_time() {
        let t = table("t,v\n3,c\n1,a\n2,b\n");
        let mut opts = CleanOptions::new(CleaningMode::TimeSeries);
        opts.time_column = Some("t".into());
        let (c, _) = clean(&t, &opts).unwrap();
        assert_eq!(num(&c, "t"), vec![Some(1.0), Some(2.0), Some(3.0)]);
        assert_eq!(c.column("v").unwrap().render(0).as_deref(), Some("a"));
    }

    #[test]
    fn timeseries_requires_valid_time_column() {
        let t = table("t,v\na,1\nb,2\n");
        let mut opts = CleanOptions::new(CleaningMode::TimeSeries);
        assert!(clean(&t, &opts).is_err());
        opts.time_column = Some("t".into());
        assert!(clean(&t, &opts).is_err());
        opts.time_column = Some("nope".into());
        assert!(clean(&t, &opts).is_err());
    }

    #[test]
    fn no_features_left_is_an_error() {
        let t = table("e,y\n,1\n,2\n").with_target(Some("y")).unwrap();
        assert!(matches!(
            clean(&t, &CleanOptions::new(CleaningMode::Light)),
            Err(Error::Cleaning(_))
        ));
    }

    #[test]
    fn target_values_never_touched() {
        let t = table("x,y\nNA,\" a\"\n2,b\n3,\" a\"\n").with_target(Some("y")).unwrap();
        let (c, _) = clean(&t, &CleanOptions::new(CleaningMode::Light)).unwrap();
        assert_eq!(c.column("y").unwrap().render(0).as_deref(), Some(" a"));
    }
}
