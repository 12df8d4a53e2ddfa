//! Seeded random tables and plans for property tests. Tables are built to
//! hit the awkward corners: zeros, negatives, huge and tiny magnitudes,
//! constants, missing cells and string columns.

#![allow(dead_code)]

use forge_core::actions::{Action, AggFn, BinaryOp, KeepCriterion, Plan, PlanOrigin, UnaryOp};
use forge_core::table::{Column, ColumnData, Table};
use rand::seq::SliceRandom;
use rand::Rng;

pub const GHOST: &str = "ghost";

fn numeric_cell(rng: &mut impl Rng, profile: u8) -> f64 {
    match profile {
        0 => rng.gen_range(-3..=3) as f64,
        1 => rng.gen_range(0.5..100.0),
        2 => rng.gen_range(-50.0..-0.1),
        3 => {
            let e = rng.gen_range(40..=300);
            let v = 10f64.powi(e) * rng.gen_range(1.0..9.0);
            if rng.gen_bool(0.5) {
                v
            } else {
                -v
            }
        }
        4 => 2.5,
        5 => rng.gen_range(1e-30..1e-20),
        _ => rng.gen_range(-1.0..1.0),
    }
}

fn numeric_column(rng: &mut impl Rng, name: &str, n: usize) -> Column {
    let profile = rng.gen_range(0..=6u8);
    let missing_rate = if rng.gen_bool(0.4) { 0.15 } else { 0.0 };
    let mut values: Vec<Option<f64>> = (0..n)
        .map(|_| (!rng.gen_bool(missing_rate)).then(|| numeric_cell(rng, profile)))
        .collect();
    if values.iter().all(Option::is_none) {
        values[0] = Some(numeric_cell(rng, profile));
    }
    Column::numeric(name, values).unwrap()
}

fn categorical_column(rng: &mut impl Rng, name: &str, n: usize) -> Column {
    let levels = ["a", "b", "c", "d"];
    let used = rng.gen_range(1..=levels.len());
    let values: Vec<Option<&str>> = (0..n)
        .map(|i| {
            if i > 0 && rng.gen_bool(0.1) {
                None
            } else {
                Some(levels[rng.gen_range(0..used)])
            }
        })
        .collect();
    Column::categorical(name, values).unwrap()
}

/// A table of 3 to 30 rows. About half carry a target `t`.
pub fn random_table(rng: &mut impl Rng) -> Table {
    let n = rng.gen_range(3..=30);
    let mut cols = Vec::new();
    for i in 0..rng.gen_range(2..=5) {
        cols.push(numeric_column(rng, &format!("x{i}"), n));
    }
    for i in 0..rng.gen_range(0..=2) {
        cols.push(categorical_column(rng, &format!("c{i}"), n));
    }
    if rng.gen_bool(0.2) {
        let flags = (0..n).map(|i| Some(i % 2 == 0)).collect();
        cols.push(Column::new("flag", ColumnData::Boolean(flags)).unwrap());
    }
    let target = match rng.gen_range(0..4) {
        0 | 1 => {
            let y = (0..n).map(|_| Some(rng.gen_range(-5.0..5.0))).collect();
            cols.push(Column::numeric("t", y).unwrap());
            Some("t")
        }
        2 => {
            cols.push(categorical_column(rng, "t", n));
            Some("t")
        }
        _ => None,
    };
    Table::new(cols).unwrap().with_target(target).unwrap()
}

fn pick(rng: &mut impl Rng, names: &[String]) -> String {
    names.choose(rng).cloned().unwrap_or_else(|| GHOST.to_owned())
}

fn unary_op(rng: &mut impl Rng) -> UnaryOp {
    match rng.gen_range(0..7) {
        0 => UnaryOp::Log1p,
        1 => UnaryOp::Sqrt,
        2 => UnaryOp::Square,
        3 => UnaryOp::Reciprocal,
        4 => UnaryOp::Zscore,
        5 => UnaryOp::Minmax,
        _ => UnaryOp::BinEqualWidth {
            k: rng.gen_range(0..=12),
        },
    }
}

fn binary_op(rng: &mut impl Rng) -> BinaryOp {
    [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div][rng.gen_range(0..4)]
}

fn agg(rng: &mut impl Rng) -> AggFn {
    [AggFn::Mean, AggFn::Min, AggFn::Max, AggFn::Count][rng.gen_range(0..4)]
}

/// A plan of 1 to 4 actions over existing, previously created and bogus
/// names. Output names are usually fresh but sometimes collide.
pub fn random_plan(rng: &mut impl Rng, table: &Table) -> Plan {
    let mut names: Vec<String> = table.column_names().iter().map(|s| s.to_string()).collect();
    names.push(GHOST.to_owned());
    let mut fresh = 0;
    let mut actions = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let out = if rng.gen_bool(0.1) {
            pick(rng, &names)
        } else {
            fresh += 1;
            format!("f{fresh}")
        };
        let action = match rng.gen_range(0..10) {
            0 => {
                let count = rng.gen_range(1..=2);
                Action::SelectDrop {
                    columns: (0..count).map(|_| pick(rng, &names)).collect(),
                }
            }
            1 => Action::SelectKeepTopK {
                k: rng.gen_range(0..=6),
                criterion: if rng.gen_bool(0.5) {
                    KeepCriterion::TargetCorrelation
                } else {
                    KeepCriterion::Variance
                },
            },
            2..=4 => Action::unary(unary_op(rng), &pick(rng, &names), &out),
            5..=7 => {
                let (l, r) = (pick(rng, &names), pick(rng, &names));
                Action::binary(binary_op(rng), &l, &r, &out)
            }
            8 => {
                let count = rng.gen_range(1..=3);
                Action::GeneratePolynomial {
                    columns: (0..count).map(|_| pick(rng, &names)).collect(),
                    out_prefix: format!("p{fresh}"),
                }
            }
            _ => Action::GenerateGroupAgg {
                group_by: pick(rng, &names),
                agg: agg(rng),
                value: pick(rng, &names),
                out_name: out.clone(),
            },
        };
        if let Action::GeneratePolynomial { columns, out_prefix } = &action {
            names.extend(Action::polynomial_names(columns, out_prefix));
        } else if !names.contains(&out) {
            names.push(out);
        }
        actions.push(action);
    }
    Plan::new(actions, PlanOrigin::Replay, 1).unwrap()
}
