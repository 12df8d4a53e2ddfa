//! Action-level planners. Implementations sit behind the [`Planner`] trait and
//! are built by name through a [`PlannerRegistry`].

mod heuristic;
mod llm;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::actions::{action_signature, Action, Plan};
use crate::error::{Error, Result};
use crate::routing::TaskKind;
use crate::table::Schema;

pub use heuristic::HeuristicPlanner;
pub use llm::{
    extract_json_array, parse_reply, render_prompt, ChatMessage, ChatRequest, ChatTransport,
    HttpTransport, LlmConfig, LlmPlanner, TransportError, API_KEY_ENV, PROMPT_TEMPLATE,
};

/// Compact summary of one past iteration. Metadata only: never any cell values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperienceDigest {
    pub iteration: usize,
    pub actions: Vec<Action>,
    pub admissible: bool,
    pub accepted: bool,
    pub metric_delta: Option<f64>,
}

impl ExperienceDigest {
    /// Short text such as `mul(x1,x2); log1p(a)`.
    pub fn plan_summary(&self) -> String {
        self.actions
            .iter()
            .map(action_signature)
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Everything a planner may look at.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerContext {
    pub task: TaskKind,
    pub schema: Schema,
    pub baseline_metric: f64,
    pub best_metric: f64,
    pub history: Vec<ExperienceDigest>,
    pub iteration: usize,
    pub remaining_actions: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlannerOutput {
    Plan {
        plan: Plan,
        /// Free-text remarks for the experience log, e.g. a fallback reason.
        notes: Vec<String>,
    },
    /// Nothing left to try. Not an error: the controller stops on it.
    Exhausted { notes: Vec<String> },
}

pub trait Planner: Send {
    fn name(&self) -> &'static str;

    fn plan(&mut self, ctx: &PlannerContext) -> Result<PlannerOutput>;
}

/// Which planner to build, with its settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PlannerKind {
    Heuristic,
    Llm(LlmConfig),
}

impl PlannerKind {
    pub fn name(&self) -> &'static str {
        match self {
            PlannerKind::Heuristic => "heuristic",
            PlannerKind::Llm(_) => "llm",
        }
    }
}

pub type PlannerFactory = fn(&PlannerKind, u64) -> Result<Box<dyn Planner>>;

/// Name-keyed planner constructors.
pub struct PlannerRegistry {
    factories: BTreeMap<&'static str, PlannerFactory>,
}

impl Default for PlannerRegistry {
    fn default() -> Self {
        let mut r = PlannerRegistry {
            factories: BTreeMap::new(),
        };
        r.register("heuristic", |_, seed| Ok(Box::new(HeuristicPlanner::new(seed))));
        r.register("llm", |kind, seed| match kind {
            PlannerKind::Llm(cfg) => Ok(Box::new(LlmPlanner::from_env(cfg.clone(), seed)?)),
            other => Err(Error::Config(format!(
                "llm factory given {} settings",
                other.name()
            ))),
        });
        r
    }
}

impl PlannerRegistry {
    pub fn register(&mut self, name: &'static str, factory: PlannerFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn build(&self, kind: &PlannerKind, seed: u64) -> Result<Box<dyn Planner>> {
        let factory = self
            .factories
            .get(kind.name())
            .ok_or_else(|| Error::Config(format!("no planner named '{}'", kind.name())))?;
        factory(kind, seed)
    }
}
