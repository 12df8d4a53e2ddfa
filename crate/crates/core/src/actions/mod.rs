//! Feature actions: the fixed vocabulary, its JSON wire form, the grounding
//! validator and the executor.
//!
//! On the wire every action is `{"op": <name>, "args": {...}}`. This form is
//! shared by the experience log and the language-model planner.

mod execute;
mod ground;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use execute::execute_plan;
pub use ground::{ground_plan, GroundingCode, GroundingReport, Verdict};

/// Most actions a single plan may carry.
pub const MAX_PLAN_ACTIONS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnaryOp {
    Log1p,
    Sqrt,
    Square,
    Reciprocal,
    Zscore,
    Minmax,
    BinEqualWidth { k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeepCriterion {
    TargetCorrelation,
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggFn {
    Mean,
    Min,
    Max,
    Count,
}

impl AggFn {
    fn as_str(self) -> &'static str {
        match self {
            AggFn::Mean => "mean",
            AggFn::Min => "min",
            AggFn::Max => "max",
            AggFn::Count => "count",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "wire::WireAction", try_from = "wire::WireAction")]
pub enum Action {
    SelectDrop {
        columns: Vec<String>,
    },
    SelectKeepTopK {
        k: usize,
        criterion: KeepCriterion,
    },
    TransformUnary {
        op: UnaryOp,
        column: String,
        out_name: String,
    },
    TransformBinary {
        op: BinaryOp,
        left: String,
        right: String,
        out_name: String,
    },
    /// Pairwise products and squares of `columns`; always degree 2.
    GeneratePolynomial {
        columns: Vec<String>,
        out_prefix: String,
    },
    GenerateGroupAgg {
        group_by: String,
        agg: AggFn,
        value: String,
        out_name: String,
    },
}

impl Action {
    pub fn unary(op: UnaryOp, column: &str, out_name: &str) -> Action {
        Action::TransformUnary {
            op,
            column: column.into(),
            out_name: out_name.into(),
        }
    }

    pub fn binary(op: BinaryOp, left: &str, right: &str, out_name: &str) -> Action {
        Action::TransformBinary {
            op,
            left: left.into(),
            right: right.into(),
            out_name: out_name.into(),
        }
    }

    /// Wire name of the operation.
    pub fn op_name(&self) -> &'static str {
        wire::WireAction::from(self.clone()).op_name()
    }

    /// Output column names of a polynomial expansion, in emission order.
    pub fn polynomial_names(columns: &[String], prefix: &str) -> Vec<String> {
        let mut names = Vec::new();
        for i in 0..columns.len() {
            for j in i..columns.len() {
                names.push(format!("{prefix}_{}_x_{}", columns[i], columns[j]));
            }
        }
        names
    }
}

/// One English sentence describing the action.
pub fn describe_action(action: &Action) -> String {
    match action {
        Action::SelectDrop { columns } => match columns.len() {
            0 => "Dropped no columns.".into(),
            1 => format!("Dropped column {}.", columns[0]),
            _ => format!("Dropped columns {}.", columns.join(", ")),
        },
        Action::SelectKeepTopK { k, criterion } => match criterion {
            KeepCriterion::TargetCorrelation => {
                format!("Kept the {k} features most correlated with the target.")
            }
            KeepCriterion::Variance => format!("Kept the {k} features with the highest variance."),
        },
        Action::TransformUnary {
            op,
            column,
            out_name,
        } => match op {
            UnaryOp::Log1p => format!("Created {out_name} = log1p({column})."),
            UnaryOp::Sqrt => format!("Created {out_name} = sqrt({column})."),
            UnaryOp::Square => format!("Created {out_name} = {column}^2."),
            UnaryOp::Reciprocal => format!("Created {out_name} = 1 / {column}."),
            UnaryOp::Zscore => format!("Created {out_name} = zscore({column})."),
            UnaryOp::Minmax => format!("Created {out_name} = minmax({column})."),
            UnaryOp::BinEqualWidth { k } => {
                format!("Created {out_name} = {column} cut into {k} equal-width bins.")
            }
        },
        Action::TransformBinary {
            op,
            left,
            right,
            out_name,
        } => format!("Created {out_name} = {left} {} {right}.", op.symbol()),
        Action::GeneratePolynomial {
            columns,
            out_prefix,
        } => format!(
            "Generated degree-2 polynomial features of {} with prefix {out_prefix}.",
            columns.join(", ")
        ),
        Action::GenerateGroupAgg {
            group_by,
            agg,
            value,
            out_name,
        } => format!(
            "Created {out_name} = {} of {value} grouped by {group_by}.",
            agg.as_str()
        ),
    }
}

/// Compact call-style rendering used in console lines, e.g. `div(a,b)`.
pub fn action_signature(action: &Action) -> String {
    let op = action.op_name();
    match action {
        Action::SelectDrop { columns } => format!("{op}({})", columns.join(",")),
        Action::SelectKeepTopK { k, criterion } => {
            let c = serde_json::to_value(criterion).expect("enum serializes");
            format!("{op}({k},{})", c.as_str().unwrap_or_default())
        }
        Action::TransformUnary { column, .. } => format!("{op}({column})"),
        Action::TransformBinary { left, right, .. } => format!("{op}({left},{right})"),
        Action::GeneratePolynomial { columns, .. } => format!("{op}({})", columns.join(",")),
        Action::GenerateGroupAgg {
            group_by, value, ..
        } => format!("{op}({group_by},{value})"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanOrigin {
    Heuristic,
    Llm,
    Replay,
}

impl fmt::Display for PlanOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlanOrigin::Heuristic => "heuristic",
            PlanOrigin::Llm => "llm",
            PlanOrigin::Replay => "replay",
        })
    }
}

/// An ordered list of 1 to 8 actions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPlan")]
pub struct Plan {
    actions: Vec<Action>,
    pub origin: PlanOrigin,
    pub iteration: usize,
}

#[derive(Deserialize)]
struct RawPlan {
    actions: Vec<Action>,
    origin: PlanOrigin,
    iteration: usize,
}

impl TryFrom<RawPlan> for Plan {
    type Error = Error;

    fn try_from(raw: RawPlan) -> Result<Plan> {
        Plan::new(raw.actions, raw.origin, raw.iteration)
    }
}

impl Plan {
    pub fn new(actions: Vec<Action>, origin: PlanOrigin, iteration: usize) -> Result<Plan> {
        if actions.is_empty() || actions.len() > MAX_PLAN_ACTIONS {
            return Err(Error::InvalidPlan(format!(
                "a plan holds 1 to {MAX_PLAN_ACTIONS} actions, got {}",
                actions.len()
            )));
        }
        Ok(Plan {
            actions,
            origin,
            iteration,
        })
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Keeps at most `n` leading actions (never fewer than one).
    pub fn truncate(&mut self, n: usize) {
        self.actions.truncate(n.max(1));
    }
}

mod wire {
    use serde::{Deserialize, Serialize};

    use super::{Action, AggFn, BinaryOp, KeepCriterion, UnaryOp};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Columns {
        columns: Vec<String>,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct KeepTopK {
        k: usize,
        criterion: KeepCriterion,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Unary {
        column: String,
        out_name: String,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Bins {
        column: String,
        out_name: String,
        k: usize,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Binary {
        left: String,
        right: String,
        out_name: String,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Polynomial {
        degree: u32,
        columns: Vec<String>,
        out_prefix: String,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct GroupAgg {
        group_by: String,
        agg: AggFn,
        value: String,
        out_name: String,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(tag = "op", content = "args", rename_all = "snake_case")]
    pub enum WireAction {
        SelectDrop(Columns),
        SelectKeepTopK(KeepTopK),
        Log1p(Unary),
        Sqrt(Unary),
        Square(Unary),
        Reciprocal(Unary),
        Zscore(Unary),
        Minmax(Unary),
        BinEqualWidth(Bins),
        Add(Binary),
        Sub(Binary),
        Mul(Binary),
        Div(Binary),
        GeneratePolynomial(Polynomial),
        GenerateGroupAgg(GroupAgg),
    }

    impl WireAction {
        pub fn op_name(&self) -> &'static str {
            match self {
                WireAction::SelectDrop(_) => "select_drop",
                WireAction::SelectKeepTopK(_) => "select_keep_top_k",
                WireAction::Log1p(_) => "log1p",
                WireAction::Sqrt(_) => "sqrt",
                WireAction::Square(_) => "square",
                WireAction::Reciprocal(_) => "reciprocal",
                WireAction::Zscore(_) => "zscore",
                WireAction::Minmax(_) => "minmax",
                WireAction::BinEqualWidth(_) => "bin_equal_width",
                WireAction::Add(_) => "add",
                WireAction::Sub(_) => "sub",
                WireAction::Mul(_) => "mul",
                WireAction::Div(_) => "div",
                WireAction::GeneratePolynomial(_) => "generate_polynomial",
                WireAction::GenerateGroupAgg(_) => "generate_group_agg",
            }
        }
    }

    impl From<Action> for WireAction {
        fn from(a: Action) -> Self {
            match a {
                Action::SelectDrop { columns } => WireAction::SelectDrop(Columns { columns }),
                Action::SelectKeepTopK { k, criterion } => {
                    WireAction::SelectKeepTopK(KeepTopK { k, criterion })
                }
                Action::TransformUnary {
                    op,
                    column,
                    out_name,
                } => {
                    let u = Unary { column, out_name };
                    match op {
                        UnaryOp::Log1p => WireAction::Log1p(u),
                        UnaryOp::Sqrt => WireAction::Sqrt(u),
                        UnaryOp::Square => WireAction::Square(u),
                        UnaryOp::Reciprocal => WireAction::Reciprocal(u),
                        UnaryOp::Zscore => WireAction::Zscore(u),
                        UnaryOp::Minmax => WireAction::Minmax(u),
                        UnaryOp::BinEqualWidth { k } => WireAction::BinEqualWidth(Bins {
                            column: u.column,
                            out_name: u.out_name,
                            k,
                        }),
                    }
                }
                Action::TransformBinary {
                    op,
                    left,
                    right,
                    out_name,
                } => {
                    let b = Binary {
                        left,
                        right,
                        out_name,
                    };
                    match op {
                        BinaryOp::Add => WireAction::Add(b),
                        BinaryOp::Sub => WireAction::Sub(b),
                        BinaryOp::Mul => WireAction::Mul(b),
                        BinaryOp::Div => WireAction::Div(b),
                    }
                }
                Action::GeneratePolynomial {
                    columns,
                    out_prefix,
                } => WireAction::GeneratePolynomial(Polynomial {
                    degree: 2,
                    columns,
                    out_prefix,
                }),
                Action::GenerateGroupAgg {
                    group_by,
                    agg,
                    value,
                    out_name,
                } => WireAction::GenerateGroupAgg(GroupAgg {
                    group_by,
                    agg,
                    value,
                    out_name,
                }),
            }
        }
    }

    impl TryFrom<WireAction> for Action {
        type Error = String;

        fn try_from(w: WireAction) -> Result<Self, String> {
            let unary = |op, u: Unary| Action::TransformUnary {
                op,
                column: u.column,
                out_name: u.out_name,
            };
            let binary = |op, b: Binary| Action::TransformBinary {
                op,
                left: b.left,
                right: b.right,
                out_name: b.out_name,
            };
            Ok(match w {
                WireAction::SelectDrop(c) => Action::SelectDrop { columns: c.columns },
                WireAction::SelectKeepTopK(k) => Action::SelectKeepTopK {
                    k: k.k,
                    criterion: k.criterion,
                },
                WireAction::Log1p(u) => unary(UnaryOp::Log1p, u),
                WireAction::Sqrt(u) => unary(UnaryOp::Sqrt, u),
                WireAction::Square(u) => unary(UnaryOp::Square, u),
                WireAction::Reciprocal(u) => unary(UnaryOp::Reciprocal, u),
                WireAction::Zscore(u) => unary(UnaryOp::Zscore, u),
                WireAction::Minmax(u) => unary(UnaryOp::Minmax, u),
                WireAction::BinEqualWidth(b) => Action::TransformUnary {
                    op: UnaryOp::BinEqualWidth { k: b.k },
                    column: b.column,
                    out_name: b.out_name,
                },
                WireAction::Add(b) => binary(BinaryOp::Add, b),
                WireAction::Sub(b) => binary(BinaryOp::Sub, b),
                WireAction::Mul(b) => binary(BinaryOp::Mul, b),
                WireAction::Div(b) => binary(BinaryOp::Div, b),
                WireAction::GeneratePolynomial(p) => {
                    if p.degree != 2 {
                        return Err(format!(
                            "generate_polynomial supports degree 2 only, got {}",
                            p.degree
                        ));
                    }
                    Action::GeneratePolynomial {
                        columns: p.columns,
                        out_prefix: p.out_prefix,
                    }
                }
                WireAction::GenerateGroupAgg(g) => Action::GenerateGroupAgg {
                    group_by: g.group_by,
                    agg: g.agg,
                    value: g.value,
                    out_name: g.out_name,
                },
            })
        }
    }
}
