use std::collections::HashSet;

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use super::{ColumnData, ColumnKind};

/// Fraction of non-missing cells that must parse for Numeric/Datetime.
const PARSE_THRESHOLD: f64 = 0.99;
const CATEGORICAL_MIN_CUTOFF: f64 = 20.0;
const CATEGORICAL_FRACTION: f64 = 0.05;

/// Cell spellings that mean "no value". Matching is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingTokens(Vec<String>);

impl Default for MissingTokens {
    fn default() -> Self {
        MissingTokens(
            ["", "NA", "N/A", "null", "NaN"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
    }
}

impl MissingTokens {
    pub fn new<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> Self {
        MissingTokens(tokens.into_iter().map(Into::into).collect())
    }

    /// Parses a comma-separated list; an empty list entry is the empty token.
    pub fn parse_list(list: &str) -> Self {
        MissingTokens(list.split(',').map(str::to_owned).collect())
    }

    pub fn is_missing(&self, cell: &str) -> bool {
        self.0.iter().any(|t| t == cell)
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }
}

pub(crate) fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub(crate) fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

/// ISO-8601 date or date-time, as epoch seconds (naive values taken as UTC).
pub(crate) fn parse_datetime(s: &str) -> Option<i64> {
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return d.and_hms_opt(0, 0, 0).map(|dt| dt.and_utc().timestamp());
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.and_utc().timestamp());
        }
    }
    None
}

/// Shortest text that parses back to exactly `v`.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-6..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn format_datetime(secs: i64) -> String {
    match DateTime::from_timestamp(secs, 0) {
        Some(dt) => dt.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
        None => secs.to_string(),
    }
}

/// Chooses a column kind from raw cell strings.
///
/// Rules, first match wins: Numeric (>=99% of present cells parse as finite
/// reals), Boolean (present values within true/false/0/1/yes/no), Datetime
/// (>=99% parse as ISO-8601), Categorical (distinct count <= max(20, 5% of
/// cells)), otherwise Text. A column with no present cells is Text.
pub fn infer_kind<S: AsRef<str>>(raw: &[S], missing: &MissingTokens) -> ColumnKind {
    let present: Vec<&str> = raw
        .iter()
        .map(AsRef::as_ref)
        .filter(|c| !missing.is_missing(c))
        .collect();
    if present.is_empty() {
        return ColumnKind::Text;
    }
    let share = |ok: usize| ok as f64 >= PARSE_THRESHOLD * present.len() as f64;

    if share(present.iter().filter(|c| parse_number(c).is_some()).count()) {
        return ColumnKind::Numeric;
    }
    if present.iter().all(|c| parse_bool(c).is_some()) {
        return ColumnKind::Boolean;
    }
    if share(present.iter().filter(|c| parse_datetime(c).is_some()).count()) {
        return ColumnKind::Datetime;
    }
    let distinct: HashSet<&str> = present.iter().copied().collect();
    let cutoff = CATEGORICAL_MIN_CUTOFF.max(CATEGORICAL_FRACTION * raw.len() as f64);
    if distinct.len() as f64 <= cutoff {
        ColumnKind::Categorical
    } else {
        ColumnKind::Text
    }
}

/// Converts raw cells into typed storage. Cells that are missing tokens, or
/// that do not parse under `kind`, become missing.
pub fn parse_cells<S: AsRef<str>>(
    raw: &[S],
    kind: ColumnKind,
    missing: &MissingTokens,
) -> ColumnData {
    let cells = raw
        .iter()
        .map(AsRef::as_ref)
        .map(|c| (!missing.is_missing(c)).then_some(c));
    match kind {
        ColumnKind::Numeric => ColumnData::Numeric(cells.map(|c| c.and_then(parse_number)).collect()),
        ColumnKind::Boolean => ColumnData::Boolean(cells.map(|c| c.and_then(parse_bool)).collect()),
        ColumnKind::Datetime => {
            ColumnData::Datetime(cells.map(|c| c.and_then(parse_datetime)).collect())
        }
        ColumnKind::Categorical => {
            ColumnData::Categorical(cells.map(|c| c.map(str::to_owned)).collect())
        }
        ColumnKind::Text => ColumnData::Text(cells.map(|c| c.map(str::to_owned)).collect()),
    }
}
