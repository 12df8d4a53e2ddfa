//! Pre-execution validation of plans against a profiled schema.
//!
//! The validator simulates the schema through the plan, so an action may use
//! a column created earlier in the same plan. Numeric columns are tracked as
//! value intervals plus a may-be-zero flag; any action whose result could be
//! non-finite is rejected, which is what makes admissible plans safe to run.

use serde::{Deserialize, Serialize};

use super::{action_signature, Action, BinaryOp, KeepCriterion, Plan, UnaryOp};
use crate::table::{ColumnKind, Schema};

/// Largest magnitude an admissible action may read or produce.
pub(crate) const MAGNITUDE_LIMIT: f64 = 1e100;
const LOG1P_EPS: f64 = 1e-9;
const MAX_BINS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroundingCode {
    /// A referenced column does not exist.
    G1,
    /// Operand kinds do not fit the operation.
    G2,
    /// A divisor may be zero.
    G3,
    /// Values fall outside the operation's domain or would overflow.
    G4,
    /// The output name is empty or already taken.
    G5,
    /// The target would be dropped or used as an operand.
    G6,
    /// The selection would leave no feature column.
    G7,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail { code: GroundingCode, message: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundingReport {
    pub verdicts: Vec<Verdict>,
    pub plan_admissible: bool,
    /// Column names and kinds after the passing actions are applied.
    #[serde(skip)]
    pub predicted: Vec<(String, ColumnKind)>,
}

impl GroundingReport {
    pub fn failures(&self) -> impl Iterator<Item = (usize, GroundingCode, &str)> + '_ {
        self.verdicts.iter().enumerate().filter_map(|(i, v)| match v {
            Verdict::Fail { code, message } => Some((i, *code, message.as_str())),
            Verdict::Pass => None,
        })
    }
}

/// Facts about a numeric column that hold for every present cell.
#[derive(Debug, Clone, Copy)]
struct Num {
    /// `None` when the column has no present values.
    range: Option<(f64, f64)>,
    may_be_zero: bool,
    /// Lower bound on |x| over present cells.
    abs_floor: f64,
}

impl Num {
    fn from_range(range: Option<(f64, f64)>) -> Num {
        match range {
            None => Num {
                range: None,
                may_be_zero: false,
                abs_floor: 0.0,
            },
            Some((lo, hi)) => {
                let (lo, hi) = widen(lo, hi);
                let abs_floor = if lo > 0.0 {
                    lo
                } else if hi < 0.0 {
                    -hi
                } else {
                    0.0
                };
                Num {
                    range: Some((lo, hi)),
                    may_be_zero: lo <= 0.0 && hi >= 0.0,
                    abs_floor,
                }
            }
        }
    }

    fn max_abs(&self) -> f64 {
        self.range.map_or(0.0, |(lo, hi)| lo.abs().max(hi.abs()))
    }
}

/// Relative outward widening absorbs rounding in non-exact functions.
fn widen(lo: f64, hi: f64) -> (f64, f64) {
    (lo - lo.abs() * 1e-9, hi + hi.abs() * 1e-9)
}

fn mul_range(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let p = [a.0 * b.0, a.0 * b.1, a.1 * b.0, a.1 * b.1];
    (
        p.iter().copied().fold(f64::INFINITY, f64::min),
        p.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )
}

/// Range of 1/x over the denominator's present values.
fn reciprocal_range(d: &Num) -> Option<(f64, f64)> {
    let (lo, hi) = d.range?;
    Some(if lo > 0.0 || hi < 0.0 {
        (1.0 / hi, 1.0 / lo)
    } else {
        let m = 1.0 / d.abs_floor;
        (-m, m)
    })
}

#[derive(Debug, Clone)]
struct SimCol {
    name: String,
    kind: ColumnKind,
    num: Option<Num>,
    created: bool,
    corr: f64,
    sd: f64,
}

type Fail = (GroundingCode, String);

struct Sim {
    cols: Vec<SimCol>,
    target: Option<String>,
    target_encodable: bool,
    n_rows: usize,
}

/// Validates every action of `plan` in order. Failures are data: the report
/// carries one verdict per action.
pub fn ground_plan(plan: &Plan, schema: &Schema) -> GroundingReport {
    let cols = schema
        .columns
        .iter()
        .map(|p| SimCol {
            name: p.name.clone(),
            kind: p.kind,
            num: (p.kind == ColumnKind::Numeric).then(|| {
                let range = p.min.zip(p.max);
                Num {
                    range,
                    may_be_zero: p.has_zero,
                    abs_floor: p.min_abs.unwrap_or(0.0),
                }
            }),
            created: false,
            corr: p.target_corr.unwrap_or(0.0),
            sd: p.stddev.unwrap_or(0.0),
        })
        .collect();
    let target_encodable = schema
        .target
        .as_deref()
        .and_then(|t| schema.column(t))
        .is_some_and(|p| p.kind != ColumnKind::Text);
    let mut sim = Sim {
        cols,
        target: schema.target.clone(),
        target_encodable,
        n_rows: schema.n_rows,
    };

    let mut verdicts = Vec::with_capacity(plan.len());
    for action in plan.actions() {
        match sim.apply(action) {
            Ok(next) => {
                sim.cols = next;
                verdicts.push(Verdict::Pass);
            }
            Err((code, message)) => verdicts.push(Verdict::Fail { code, message }),
        }
    }
    GroundingReport {
        plan_admissible: verdicts.iter().all(Verdict::is_pass),
        verdicts,
        predicted: sim.cols.iter().map(|c| (c.name.clone(), c.kind)).collect(),
    }
}

impl Sim {
    fn is_target(&self, name: &str) -> bool {
        self.target.as_deref() == Some(name)
    }

    fn get(&self, name: &str, sig: &str) -> Result<&SimCol, Fail> {
        self.cols.iter().find(|c| c.name == name).ok_or_else(|| {
            (
                GroundingCode::G1,
                format!("unknown column '{name}' in {sig}"),
            )
        })
    }

    fn numeric(&self, col: &SimCol, sig: &str) -> Result<Num, Fail> {
        col.num.ok_or_else(|| {
            (
                GroundingCode::G2,
                format!(
                    "column '{}' is {}, numeric required in {sig}",
                    col.name, col.kind
                ),
            )
        })
    }

    fn input_magnitude(&self, col: &SimCol, num: &Num, sig: &str) -> Result<(), Fail> {
        if num.max_abs() > MAGNITUDE_LIMIT {
            return Err((
                GroundingCode::G4,
                format!("magnitude of '{}' exceeds 1e100 in {sig}", col.name),
            ));
        }
        Ok(())
    }

    fn output(&self, range: Option<(f64, f64)>, sig: &str) -> Result<Num, Fail> {
        if let Some((lo, hi)) = range {
            let bad = |v: f64| !v.is_finite() || v.abs() > MAGNITUDE_LIMIT;
            if bad(lo) || bad(hi) {
                return Err((GroundingCode::G4, format!("result may overflow in {sig}")));
            }
        }
        Ok(Num::from_range(range))
    }

    fn fresh_name(&self, name: &str, sig: &str) -> Result<(), Fail> {
        if name.trim().is_empty() {
            return Err((GroundingCode::G5, format!("empty output name in {sig}")));
        }
        if self.cols.iter().any(|c| c.name == name) {
            return Err((
                GroundingCode::G5,
                format!("output name '{name}' already exists in {sig}"),
            ));
        }
        Ok(())
    }

    fn not_target(&self, operands: &[&str], sig: &str) -> Result<(), Fail> {
        match operands.iter().find(|o| self.is_target(o)) {
            Some(t) => Err((
                GroundingCode::G6,
                format!("target '{t}' used as an operand in {sig}"),
            )),
            None => Ok(()),
        }
    }

    fn n_features(&self, cols: &[SimCol]) -> usize {
        cols.iter().filter(|c| !self.is_target(&c.name)).count()
    }

    fn with(&self, name: &str, kind: ColumnKind, num: Option<Num>) -> Vec<SimCol> {
        let mut next = self.cols.clone();
        next.push(SimCol {
            name: name.to_owned(),
            kind,
            num,
            created: true,
            corr: 0.0,
            sd: 0.0,
        });
        next
    }

    fn apply(&self, action: &Action) -> Result<Vec<SimCol>, Fail> {
        let sig = action_signature(action);
        let sig = sig.as_str();
        match action {
            Action::SelectDrop { columns } => {
                for c in columns {
                    self.get(c, sig)?;
                }
                if let Some(t) = columns.iter().find(|c| self.is_target(c)) {
                    return Err((GroundingCode::G6, format!("target '{t}' dropped in {sig}")));
                }
                let next: Vec<SimCol> = self
                    .cols
                    .iter()
                    .filter(|c| !columns.contains(&c.name))
                    .cloned()
                    .collect();
                if self.n_features(&next) == 0 {
                    return Err((GroundingCode::G7, format!("no feature left after {sig}")));
                }
                Ok(next)
            }
            Action::SelectKeepTopK { k, criterion } => {
                if *criterion == KeepCriterion::TargetCorrelation && !self.target_encodable {
                    return Err((
                        GroundingCode::G2,
                        format!("{sig} needs a target with a numeric encoding"),
                    ));
                }
                let dropped = keep_top_k_losers(
                    self.cols.iter().enumerate().filter_map(|(i, c)| {
                        let eligible = !c.created
                            && c.kind == ColumnKind::Numeric
                            && !self.is_target(&c.name);
                        let score = match criterion {
                            KeepCriterion::TargetCorrelation => c.corr,
                            KeepCriterion::Variance => c.sd,
                        };
                        eligible.then_some((i, score))
                    }),
                    *k,
                );
                let next: Vec<SimCol> = self
                    .cols
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !dropped.contains(i))
                    .map(|(_, c)| c.clone())
                    .collect();
                if *k == 0 || self.n_features(&next) == 0 {
                    return Err((GroundingCode::G7, format!("no feature left after {sig}")));
                }
                Ok(next)
            }
            Action::TransformUnary {
                op,
                column,
                out_name,
            } => {
                let col = self.get(column, sig)?;
                let num = self.numeric(col, sig)?;
                if *op == UnaryOp::Reciprocal && num.may_be_zero {
                    return Err((GroundingCode::G3, format!("division by zero in {sig}")));
                }
                self.input_magnitude(col, &num, sig)?;
                let (kind, out) = match op {
                    UnaryOp::Log1p => {
                        if num.range.is_some_and(|(lo, _)| lo < -1.0 + LOG1P_EPS) {
                            return Err((
                                GroundingCode::G4,
                                format!("values of '{column}' at or below -1 in {sig}"),
                            ));
                        }
                        let r = num.range.map(|(lo, hi)| (lo.ln_1p(), hi.ln_1p()));
                        (ColumnKind::Numeric, Some(self.output(r, sig)?))
                    }
                    UnaryOp::Sqrt => {
                        if num.range.is_some_and(|(lo, _)| lo < 0.0) {
                            return Err((
                                GroundingCode::G4,
                                format!("negative values of '{column}' in {sig}"),
                            ));
                        }
                        let r = num.range.map(|(lo, hi)| (lo.max(0.0).sqrt(), hi.sqrt()));
                        (ColumnKind::Numeric, Some(self.output(r, sig)?))
                    }
                    UnaryOp::Square => {
                        let r = num.range.map(|(lo, hi)| {
                            let m = (lo * lo).max(hi * hi);
                            if lo >= 0.0 || hi <= 0.0 {
                                ((lo * lo).min(hi * hi), m)
                            } else {
                                (0.0, m)
                            }
                        });
                        (ColumnKind::Numeric, Some(self.output(r, sig)?))
                    }
                    UnaryOp::Reciprocal => {
                        let r = reciprocal_range(&num);
                        (ColumnKind::Numeric, Some(self.output(r, sig)?))
                    }
                    UnaryOp::Zscore => {
                        let b = 2.0 * (self.n_rows as f64).sqrt() + 1.0;
                        let r = num.range.map(|_| (-b, b));
                        (ColumnKind::Numeric, Some(self.output(r, sig)?))
                    }
                    UnaryOp::Minmax => {
                        let r = num.range.map(|_| (0.0, 1.0));
                        (ColumnKind::Numeric, Some(self.output(r, sig)?))
                    }
                    UnaryOp::BinEqualWidth { k } => {
                        if *k == 0 || *k > MAX_BINS {
                            return Err((
                                GroundingCode::G4,
                                format!("bin count {k} outside 1..={MAX_BINS} in {sig}"),
                            ));
                        }
                        (ColumnKind::Categorical, None)
                    }
                };
                self.fresh_name(out_name, sig)?;
                self.not_target(&[column], sig)?;
                Ok(self.with(out_name, kind, out))
            }
            Action::TransformBinary {
                op,
                left,
                right,
                out_name,
            } => {
                let l = self.get(left, sig)?;
                let r = self.get(right, sig)?;
                let ln = self.numeric(l, sig)?;
                let rn = self.numeric(r, sig)?;
                if *op == BinaryOp::Div && rn.may_be_zero {
                    return Err((GroundingCode::G3, format!("division by zero in {sig}")));
                }
                self.input_magnitude(l, &ln, sig)?;
                self.input_magnitude(r, &rn, sig)?;
                let range = match (ln.range, rn.range) {
                    (Some(a), Some(b)) => Some(match op {
                        BinaryOp::Add => (a.0 + b.0, a.1 + b.1),
                        BinaryOp::Sub => (a.0 - b.1, a.1 - b.0),
                        BinaryOp::Mul => mul_range(a, b),
                        BinaryOp::Div => mul_range(a, reciprocal_range(&rn).expect("present")),
                    }),
                    _ => None,
                };
                let out = self.output(range, sig)?;
                self.fresh_name(out_name, sig)?;
                self.not_target(&[left, right], sig)?;
                Ok(self.with(out_name, ColumnKind::Numeric, Some(out)))
            }
            Action::GeneratePolynomial {
                columns,
                out_prefix,
            } => {
                let cols = columns
                    .iter()
                    .map(|c| self.get(c, sig))
                    .collect::<Result<Vec<_>, _>>()?;
                let nums = cols
                    .iter()
                    .map(|c| self.numeric(c, sig))
                    .collect::<Result<Vec<_>, _>>()?;
                if cols.is_empty() {
                    return Err((GroundingCode::G4, format!("{sig} needs at least one column")));
                }
                for (c, n) in cols.iter().zip(&nums) {
                    self.input_magnitude(c, n, sig)?;
                }
                let mut outs = Vec::new();
                for i in 0..nums.len() {
                    for j in i..nums.len() {
                        let r = nums[i].range.zip(nums[j].range).map(|(a, b)| mul_range(a, b));
                        outs.push(self.output(r, sig)?);
                    }
                }
                let names = Action::polynomial_names(columns, out_prefix);
                let mut next = self.cols.clone();
                for (name, num) in names.iter().zip(outs) {
                    if name.trim().is_empty() || next.iter().any(|c| &c.name == name) {
                        return Err((
                            GroundingCode::G5,
                            format!("output name '{name}' already exists in {sig}"),
                        ));
                    }
                    next.push(SimCol {
                        name: name.clone(),
                        kind: ColumnKind::Numeric,
                        num: Some(num),
                        created: true,
                        corr: 0.0,
                        sd: 0.0,
                    });
                }
                let operands: Vec<&str> = columns.iter().map(String::as_str).collect();
                self.not_target(&operands, sig)?;
                Ok(next)
            }
            Action::GenerateGroupAgg {
                group_by,
                agg,
                value,
                out_name,
            } => {
                let g = self.get(group_by, sig)?;
                let v = self.get(value, sig)?;
                if g.kind != ColumnKind::Categorical {
                    return Err((
                        GroundingCode::G2,
                        format!("group key '{group_by}' is {}, categorical required in {sig}", g.kind),
                    ));
                }
                let vn = self.numeric(v, sig)?;
                self.input_magnitude(v, &vn, sig)?;
                let range = match agg {
                    super::AggFn::Count => Some((1.0, self.n_rows.max(1) as f64)),
                    _ => vn.range,
                };
                let out = self.output(range, sig)?;
                self.fresh_name(out_name, sig)?;
                self.not_target(&[group_by, value], sig)?;
                Ok(self.with(out_name, ColumnKind::Numeric, Some(out)))
            }
        }
    }
}

/// Indices of the eligible columns that fall outside the top `k` by score.
/// Higher scores win; equal scores keep the earlier column.
pub(crate) fn keep_top_k_losers(
    eligible: impl Iterator<Item = (usize, f64)>,
    k: usize,
) -> Vec<usize> {
    let mut ranked: Vec<(usize, f64)> = eligible.collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.into_iter().skip(k).map(|(i, _)| i).collect()
}
