use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::ground::keep_top_k_losers;
use super::{
    describe_action, ground_plan, Action, AggFn, BinaryOp, KeepCriterion, Plan, UnaryOp,
};
use crate::error::{Error, Result};
use crate::table::{profile, Column, ColumnData, ColumnKind, Schema, Table};

/// Runs an admissible plan and returns the transformed table. The input is
/// not modified. Plans that fail grounding are refused with a contract error.
pub fn execute_plan(plan: &Plan, table: &Table) -> Result<Table> {
    let report = ground_plan(plan, &Schema::of(table));
    if let Some((i, code, msg)) = report.failures().next() {
        return Err(Error::Contract(format!(
            "refusing to execute plan: action {} failed {code:?}: {msg}",
            i + 1
        )));
    }

    let profiles = profile(table);
    let mut cols: Vec<Arc<Column>> = table.shared_columns().to_vec();
    let mut created: HashSet<String> = HashSet::new();
    let target = table.target();
    let lookup = |cols: &[Arc<Column>], name: &str| -> Result<Arc<Column>> {
        cols.iter()
            .find(|c| c.name() == name)
            .cloned()
            .ok_or_else(|| Error::Contract(format!("column '{name}' vanished during execution")))
    };

    for action in plan.actions() {
        match action {
            Action::SelectDrop { columns } => {
                cols.retain(|c| !columns.iter().any(|d| d == c.name()));
            }
            Action::SelectKeepTopK { k, criterion } => {
                let score = |name: &str| {
                    let p = profiles.iter().find(|p| p.name == name);
                    match criterion {
                        KeepCriterion::TargetCorrelation => p.and_then(|p| p.target_corr),
                        KeepCriterion::Variance => p.and_then(|p| p.stddev),
                    }
                    .unwrap_or(0.0)
                };
                let losers = keep_top_k_losers(
                    cols.iter().enumerate().filter_map(|(i, c)| {
                        let eligible = !created.contains(c.name())
                            && c.kind() == ColumnKind::Numeric
                            && target != Some(c.name());
                        eligible.then(|| (i, score(c.name())))
                    }),
                    *k,
                );
                let mut i = 0;
                cols.retain(|_| {
                    let keep = !losers.contains(&i);
                    i += 1;
                    keep
                });
            }
            Action::TransformUnary {
                op,
                column,
                out_name,
            } => {
                let src = lookup(&cols, column)?;
                let data = unary(*op, numeric(&src)?);
                cols.push(Arc::new(Column::new(out_name.as_str(), data)?));
                created.insert(out_name.clone());
            }
            Action::TransformBinary {
                op,
                left,
                right,
                out_name,
            } => {
                let l = lookup(&cols, left)?;
                let r = lookup(&cols, right)?;
                let f: fn(f64, f64) -> f64 = match op {
                    BinaryOp::Add => |a, b| a + b,
                    BinaryOp::Sub => |a, b| a - b,
                    BinaryOp::Mul => |a, b| a * b,
                    BinaryOp::Div => |a, b| a / b,
                };
                let values = zip_with(numeric(&l)?, numeric(&r)?, f);
                cols.push(Arc::new(Column::numeric(out_name.as_str(), values)?));
                created.insert(out_name.clone());
            }
            Action::GeneratePolynomial {
                columns,
                out_prefix,
            } => {
                let srcs = columns
                    .iter()
                    .map(|c| lookup(&cols, c))
                    .collect::<Result<Vec<_>>>()?;
                let names = Action::polynomial_names(columns, out_prefix);
                let mut names = names.into_iter();
                for i in 0..srcs.len() {
                    for j in i..srcs.len() {
                        let name = names.next().expect("one name per pair");
                        let values = zip_with(numeric(&srcs[i])?, numeric(&srcs[j])?, |a, b| a * b);
                        cols.push(Arc::new(Column::numeric(name.as_str(), values)?));
                        created.insert(name);
                    }
                }
            }
            Action::GenerateGroupAgg {
                group_by,
                agg,
                value,
                out_name,
            } => {
                let g = lookup(&cols, group_by)?;
                let v = lookup(&cols, value)?;
                let ColumnData::Categorical(keys) = g.data() else {
                    return Err(Error::Contract(format!("group key '{group_by}' not categorical")));
                };
                let values = group_agg(keys, numeric(&v)?, *agg);
                cols.push(Arc::new(Column::numeric(out_name.as_str(), values)?));
                created.insert(out_name.clone());
            }
        }
    }

    let out = table.derive(cols, plan.actions().iter().map(describe_action))?;
    for col in out.columns() {
        if let Some(v) = col.as_numeric() {
            if v.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Contract(format!(
                    "non-finite value produced in column '{}'",
                    col.name()
                )));
            }
        }
    }
    Ok(out)
}

fn numeric(col: &Column) -> Result<&[Option<f64>]> {
    col.as_numeric().ok_or_else(|| {
        Error::Contract(format!(
            "column '{}' is {}, numeric required",
            col.name(),
            col.kind()
        ))
    })
}

fn zip_with(a: &[Option<f64>], b: &[Option<f64>], f: impl Fn(f64, f64) -> f64) -> Vec<Option<f64>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| Some(f((*x)?, (*y)?)))
        .collect()
}

fn unary(op: UnaryOp, xs: &[Option<f64>]) -> ColumnData {
    let present: Vec<f64> = xs.iter().flatten().copied().collect();
    let map = |f: &dyn Fn(f64) -> f64| -> ColumnData {
        ColumnData::Numeric(xs.iter().map(|x| x.map(f)).collect())
    };
    match op {
        UnaryOp::Log1p => map(&f64::ln_1p),
        UnaryOp::Sqrt => map(&f64::sqrt),
        UnaryOp::Square => map(&|x| x * x),
        UnaryOp::Reciprocal => map(&|x| 1.0 / x),
        UnaryOp::Zscore => {
            if present.is_empty() {
                return map(&|x| x);
            }
            let m = crate::table::Moments::of(&present);
            let sd = m.sample_stddev();
            if sd > 0.0 && sd.is_finite() {
                map(&|x| (x - m.mean) / sd)
            } else {
                map(&|_| 0.0)
            }
        }
        UnaryOp::Minmax => {
            let (lo, hi) = bounds(&present);
            if hi > lo {
                map(&|x| ((x - lo) / (hi - lo)).clamp(0.0, 1.0))
            } else {
                map(&|_| 0.0)
            }
        }
        UnaryOp::BinEqualWidth { k } => {
            let (lo, hi) = bounds(&present);
            let labels = xs
                .iter()
                .map(|x| {
                    x.map(|x| {
                        let b = if hi > lo {
                            (((x - lo) / (hi - lo)) * k as f64).floor() as usize
                        } else {
                            0
                        };
                        format!("b{}", b.min(k.saturating_sub(1)))
                    })
                })
                .collect();
            ColumnData::Categorical(labels)
        }
    }
}

fn bounds(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    })
}

/// Per-row aggregate of `values` over the row's group. Rows with a missing
/// key get a missing result; `count` is the group's row count.
fn group_agg(keys: &[Option<String>], values: &[Option<f64>], agg: AggFn) -> Vec<Option<f64>> {
    #[derive(Default)]
    struct Acc {
        rows: usize,
        n: usize,
        sum: f64,
        min: f64,
        max: f64,
    }
    let mut groups: HashMap<&str, Acc> = HashMap::new();
    for (k, v) in keys.iter().zip(values) {
        let Some(k) = k else { continue };
        let acc = groups.entry(k.as_str()).or_insert_with(|| Acc {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            ..Acc::default()
        });
        acc.rows += 1;
        if let Some(v) = v {
            acc.n += 1;
            acc.sum += v;
            acc.min = acc.min.min(*v);
            acc.max = acc.max.max(*v);
        }
    }
    keys.iter()
        .map(|k| {
            let acc = &groups[k.as_deref()?];
            match agg {
                AggFn::Count => Some(acc.rows as f64),
                _ if acc.n == 0 => None,
                // the mean stays inside [min, max] even when the sum rounds
                AggFn::Mean => Some((acc.sum / acc.n as f64).clamp(acc.min, acc.max)),
                AggFn::Min => Some(acc.min),
                AggFn::Max => Some(acc.max),
            }
        })
        .collect()
}
