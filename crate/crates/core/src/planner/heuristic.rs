//! Deterministic rule-based planner.
//!
//! Rules, in priority order:
//! - H1: heavily skewed numeric column (|skew| > 2, min > -1) gets `log1p`
//! - H2: product of a pair among the five columns most correlated with the target
//! - H3: too many features for the row count, so keep the better half
//! - H4: unnormalized numeric column gets `zscore`
//! - H5: degree-2 polynomial over the three highest-variance columns
//!
//! Each rule contributes at most one action to a plan and a plan holds at most
//! three. Actions seen in earlier iterations are not proposed again, except
//! that an action from a rejected multi-action plan gets one retry on its own.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use super::{Planner, PlannerContext, PlannerOutput};
use crate::actions::{
    ground_plan, Action, BinaryOp, KeepCriterion, Plan, PlanOrigin, UnaryOp,
};
use crate::error::Result;
use crate::routing::TaskKind;
use crate::table::{ColumnKind, ColumnProfile, Schema};

const MAX_HEURISTIC_ACTIONS: usize = 3;
const SKEW_LIMIT: f64 = 2.0;
const LOG1P_FLOOR: f64 = -1.0 + 1e-9;
const TOP_CORRELATED: usize = 5;
const TOP_VARIANCE: usize = 3;

#[derive(Debug, Clone)]
pub struct HeuristicPlanner {
    seed: u64,
}

impl HeuristicPlanner {
    pub fn new(seed: u64) -> Self {
        HeuristicPlanner { seed }
    }

    /// Builds the next plan, or `None` when every candidate has been tried.
    pub fn propose(&self, ctx: &PlannerContext) -> Option<Plan> {
        let mut solo_tried: HashSet<&Action> = HashSet::new();
        let mut bundle_rejected: HashSet<&Action> = HashSet::new();
        for d in &ctx.history {
            for a in &d.actions {
                if d.accepted || !d.admissible || d.actions.len() == 1 {
                    solo_tried.insert(a);
                } else {
                    bundle_rejected.insert(a);
                }
            }
        }

        let cap = ctx.remaining_actions.clamp(1, MAX_HEURISTIC_ACTIONS);
        let candidates = self.candidates(ctx);
        let admissible = |actions: Vec<Action>| {
            let plan = Plan::new(actions, PlanOrigin::Heuristic, ctx.iteration).ok()?;
            ground_plan(&plan, &ctx.schema).plan_admissible.then_some(plan)
        };
        // actions from rejected bundles get one solo retry before anything new
        for (_, action) in &candidates {
            if bundle_rejected.contains(action) && !solo_tried.contains(action) {
                if let Some(plan) = admissible(vec![action.clone()]) {
                    return Some(plan);
                }
            }
        }
        let mut chosen: Vec<Action> = Vec::new();
        let mut rules_used: Vec<u8> = Vec::new();
        for (rule, action) in candidates {
            if rules_used.contains(&rule)
                || solo_tried.contains(&action)
                || bundle_rejected.contains(&action)
                || chosen.contains(&action)
            {
                continue;
            }
            let mut trial = chosen.clone();
            trial.push(action);
            if admissible(trial.clone()).is_none() {
                continue;
            }
            chosen = trial;
            rules_used.push(rule);
            if chosen.len() == cap {
                break;
            }
        }
        if chosen.is_empty() {
            None
        } else {
            Plan::new(chosen, PlanOrigin::Heuristic, ctx.iteration).ok()
        }
    }

    fn tie(&self, name: &str) -> u64 {
        let mut h = DefaultHasher::new();
        self.seed.hash(&mut h);
        name.hash(&mut h);
        h.finish()
    }

    /// Sorts by descending score, then by the seeded name hash.
    fn rank<'a>(&self, mut cols: Vec<(&'a ColumnProfile, f64)>) -> Vec<(&'a ColumnProfile, f64)> {
        cols.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| self.tie(&a.0.name).cmp(&self.tie(&b.0.name)))
        });
        cols
    }

    /// All candidate actions tagged with their rule number, in priority order.
    fn candidates(&self, ctx: &PlannerContext) -> Vec<(u8, Action)> {
        let s = &ctx.schema;
        let exists = |name: &str| s.column(name).is_some();
        let numeric: Vec<&ColumnProfile> = s
            .features()
            .filter(|p| p.kind == ColumnKind::Numeric && p.min.is_some())
            .collect();
        let mut out = Vec::new();

        // H1
        let skewed = numeric
            .iter()
            .filter(|p| {
                p.skewness.is_some_and(|k| k.abs() > SKEW_LIMIT)
                    && p.min.is_some_and(|m| m > LOG1P_FLOOR)
            })
            .map(|p| (*p, p.skewness.unwrap_or(0.0).abs()))
            .collect();
        for (p, _) in self.rank(skewed) {
            let out_name = format!("{}_log1p", p.name);
            if !exists(&out_name) {
                out.push((1, Action::unary(UnaryOp::Log1p, &p.name, &out_name)));
            }
        }

        // H2
        if ctx.task != TaskKind::Unsupervised {
            let scored = numeric
                .iter()
                .filter_map(|p| p.target_corr.map(|c| (*p, c)))
                .collect();
            let top: Vec<(&ColumnProfile, f64)> =
                self.rank(scored).into_iter().take(TOP_CORRELATED).collect();
            let mut pairs = Vec::new();
            for i in 0..top.len() {
                for j in i + 1..top.len() {
                    pairs.push((i, j, top[i].1 + top[j].1));
                }
            }
            pairs.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
            for (i, j, _) in pairs {
                let (a, b) = (&top[i].0.name, &top[j].0.name);
                let name = format!("{a}_x_{b}");
                if !exists(&name) && !exists(&format!("{b}_x_{a}")) {
                    out.push((2, Action::binary(BinaryOp::Mul, a, b, &name)));
                }
            }
        }

        // H3
        let n_features = s.features().count();
        let limit = 2 * (s.n_rows as f64).sqrt().ceil() as usize;
        if n_features > limit {
            let criterion = if ctx.task != TaskKind::Unsupervised && s.target.is_some() {
                KeepCriterion::TargetCorrelation
            } else {
                KeepCriterion::Variance
            };
            out.push((
                3,
                Action::SelectKeepTopK {
                    k: n_features.div_ceil(2),
                    criterion,
                },
            ));
        }

        // H4
        for p in &numeric {
            let (Some(mean), Some(sd), Some(lo), Some(hi)) = (p.mean, p.stddev, p.min, p.max)
            else {
                continue;
            };
            if sd > 0.0 && (mean.abs() > 10.0 * sd || hi - lo > 1000.0) {
                let out_name = format!("{}_z", p.name);
                if !exists(&out_name) {
                    out.push((4, Action::unary(UnaryOp::Zscore, &p.name, &out_name)));
                }
            }
        }

        // H5
        let by_var = numeric
            .iter()
            .filter_map(|p| p.stddev.filter(|sd| *sd > 0.0).map(|sd| (*p, sd)))
            .collect();
        let cols: Vec<String> = self
            .rank(by_var)
            .into_iter()
            .take(TOP_VARIANCE)
            .map(|(p, _)| p.name.clone())
            .collect();
        if !cols.is_empty() {
            if let Some(prefix) = free_prefix(s, &cols) {
                out.push((
                    5,
                    Action::GeneratePolynomial {
                        columns: cols,
                        out_prefix: prefix,
                    },
                ));
            }
        }
        out
    }
}

/// First of `poly`, `poly2`, `poly3`, ... whose generated names are all unused.
fn free_prefix(s: &Schema, cols: &[String]) -> Option<String> {
    (1..100).find_map(|i| {
        let prefix = if i == 1 {
            "poly".to_owned()
        } else {
            format!("poly{i}")
        };
        Action::polynomial_names(cols, &prefix)
            .iter()
            .all(|n| s.column(n).is_none())
            .then_some(prefix)
    })
}

impl Planner for HeuristicPlanner {
    fn name(&self) -> &'static str {
        "heuristic"
    }

    fn plan(&mut self, ctx: &PlannerContext) -> Result<PlannerOutput> {
        Ok(match self.propose(ctx) {
            Some(plan) => PlannerOutput::Plan {
                plan,
                notes: Vec::new(),
            },
            None => PlannerOutput::Exhausted {
                notes: vec!["every heuristic candidate has been tried".into()],
            },
        })
    }
}
