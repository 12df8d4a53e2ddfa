use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{Column, ColumnData, ColumnKind, Table};

/// Per-column metadata. This is everything the router and planners ever see
/// of the data; no raw rows leave the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnProfile {
    pub name: String,
    pub kind: ColumnKind,
    pub missing_rate: f64,
    pub n_distinct: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
    /// Sample standard deviation (n - 1 denominator).
    pub stddev: Option<f64>,
    pub skewness: Option<f64>,
    /// Up to five `(value, count)` pairs, most frequent first (categorical only).
    pub top_values: Vec<(String, usize)>,
    pub has_zero: bool,
    pub has_nonpositive: bool,
    /// Smallest absolute present value (numeric only).
    pub min_abs: Option<f64>,
    /// Every present value is a whole number (numeric only).
    pub integral: bool,
    /// |Pearson correlation| with the numerically encoded target, for numeric
    /// feature columns of a table that has a target.
    pub target_corr: Option<f64>,
}

/// The profiled shape of a table: what grounding and planning reason over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub n_rows: usize,
    pub target: Option<String>,
    pub columns: Vec<ColumnProfile>,
}

impl Schema {
    pub fn of(table: &Table) -> Schema {
        Schema {
            n_rows: table.n_rows(),
            target: table.target().map(str::to_owned),
            columns: profile(table),
        }
    }

    pub fn column(&self, name: &str) -> Option<&ColumnProfile> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn features(&self) -> impl Iterator<Item = &ColumnProfile> + '_ {
        self.columns
            .iter()
            .filter(move |c| self.target.as_deref() != Some(c.name.as_str()))
    }
}

/// One profile per column, statistics over present cells only.
pub fn profile(table: &Table) -> Vec<ColumnProfile> {
    let target = table
        .target()
        .and_then(|t| table.column(t))
        .and_then(encode_target_numeric);
    table
        .columns()
        .map(|col| {
            let corr = match (&target, col.as_numeric()) {
                (Some(y), Some(x)) if !table.is_target(col.name()) => Some(pearson_abs(x, y)),
                _ => None,
            };
            profile_column(col, table.n_rows(), corr)
        })
        .collect()
}

fn profile_column(col: &Column, n_rows: usize, target_corr: Option<f64>) -> ColumnProfile {
    let missing = col.missing_count();
    let mut p = ColumnProfile {
        name: col.name().to_owned(),
        kind: col.kind(),
        missing_rate: if n_rows == 0 { 0.0 } else { missing as f64 / n_rows as f64 },
        n_distinct: 0,
        min: None,
        max: None,
        mean: None,
        stddev: None,
        skewness: None,
        top_values: Vec::new(),
        has_zero: false,
        has_nonpositive: false,
        min_abs: None,
        integral: false,
        target_corr,
    };
    match col.data() {
        ColumnData::Numeric(v) => {
            let xs: Vec<f64> = v.iter().flatten().copied().collect();
            p.n_distinct = xs
                .iter()
                .map(|x| (x + 0.0).to_bits())
                .collect::<BTreeSet<_>>()
                .len();
            p.has_zero = xs.contains(&0.0);
            p.has_nonpositive = xs.iter().any(|&x| x <= 0.0);
            p.integral = !xs.is_empty() && xs.iter().all(|x| x.fract() == 0.0);
            if !xs.is_empty() {
                p.min = xs.iter().copied().reduce(f64::min);
                p.max = xs.iter().copied().reduce(f64::max);
                p.min_abs = xs.iter().map(|x| x.abs()).reduce(f64::min);
                let m = Moments::of(&xs);
                p.mean = Some(m.mean);
                p.stddev = Some(m.sample_stddev());
                p.skewness = Some(m.skewness());
            }
        }
        ColumnData::Categorical(v) | ColumnData::Text(v) => {
            let mut counts: HashMap<&str, usize> = HashMap::new();
            for s in v.iter().flatten() {
                *counts.entry(s.as_str()).or_default() += 1;
            }
            p.n_distinct = counts.len();
            if col.kind() == ColumnKind::Categorical {
                let mut top: Vec<(&str, usize)> = counts.into_iter().collect();
                top.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
                p.top_values = top
                    .into_iter()
                    .take(5)
                    .map(|(s, c)| (s.to_owned(), c))
                    .collect();
            }
        }
        ColumnData::Boolean(v) => {
            p.n_distinct = v.iter().flatten().collect::<BTreeSet<_>>().len();
        }
        ColumnData::Datetime(v) => {
            p.n_distinct = v.iter().flatten().collect::<BTreeSet<_>>().len();
        }
    }
    p
}

/// Central moments of a non-empty sample.
pub(crate) struct Moments {
    pub n: usize,
    pub mean: f64,
    /// Sum of squared deviations.
    pub ss: f64,
    /// Sum of cubed deviations.
    pub s3: f64,
}

impl Moments {
    pub fn of(xs: &[f64]) -> Moments {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let (mut ss, mut s3) = (0.0, 0.0);
        for &x in xs {
            let d = x - mean;
            ss += d * d;
            s3 += d * d * d;
        }
        Moments { n, mean, ss, s3 }
    }

    pub fn sample_stddev(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.ss / (self.n - 1) as f64).sqrt()
        }
    }

    /// Moment coefficient of skewness `m3 / m2^1.5`; zero for constant samples.
    pub fn skewness(&self) -> f64 {
        let m2 = self.ss / self.n as f64;
        if m2 <= 0.0 {
            return 0.0;
        }
        let g = (self.s3 / self.n as f64) / m2.powf(1.5);
        if g.is_finite() {
            g
        } else {
            0.0
        }
    }
}

/// Numeric view of a target: numbers as-is, booleans as 0/1, categories as
/// their rank in lexicographic order, datetimes as epoch seconds. Text has no
/// numeric encoding.
pub fn encode_target_numeric(col: &Column) -> Option<Vec<Option<f64>>> {
    match col.data() {
        ColumnData::Numeric(v) => Some(v.clone()),
        ColumnData::Boolean(v) => Some(v.iter().map(|b| b.map(|b| b as u8 as f64)).collect()),
        ColumnData::Datetime(v) => Some(v.iter().map(|d| d.map(|d| d as f64)).collect()),
        ColumnData::Categorical(v) => {
            let levels: BTreeSet<&str> = v.iter().flatten().map(String::as_str).collect();
            let index: HashMap<&str, usize> =
                levels.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
            Some(
                v.iter()
                    .map(|s| s.as_deref().map(|s| index[s] as f64))
                    .collect(),
            )
        }
        ColumnData::Text(_) => None,
    }
}

/// |Pearson r| over rows where both values are present; 0 when undefined.
pub fn pearson_abs(x: &[Option<f64>], y: &[Option<f64>]) -> f64 {
    let pairs: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .collect();
    if pairs.len() < 2 {
        return 0.0;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(a, b) in &pairs {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).abs();
    if r.is_finite() {
        r.min(1.0)
    } else {
        0.0
    }
}
