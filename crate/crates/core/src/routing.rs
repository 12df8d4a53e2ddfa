//! Task-level router: a fixed rule table over the column profiles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{ColumnKind, ColumnProfile};

/// Largest distinct-value count for an integral numeric target to be
/// treated as class labels.
const MAX_INTEGRAL_CLASSES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Classification,
    Regression,
    Unsupervised,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Classification => "classification",
            TaskKind::Regression => "regression",
            TaskKind::Unsupervised => "unsupervised",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classification" => Ok(TaskKind::Classification),
            "regression" => Ok(TaskKind::Regression),
            "unsupervised" => Ok(TaskKind::Unsupervised),
            other => Err(Error::Config(format!("unknown task kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoutingRule {
    R1,
    R2,
    R3,
    R4,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingDecision {
    pub task: TaskKind,
    pub rule_fired: RoutingRule,
    pub rationale: String,
}

/// Picks the task kind. First matching rule wins:
///
/// - R1: an explicit hint
/// - R2: no target, so unsupervised
/// - R3: categorical/boolean target, or an integral numeric target with at
///   most 20 distinct values, so classification
/// - R4: anything else is regression
pub fn route_task(
    profiles: &[ColumnProfile],
    target: Option<&str>,
    hint: Option<TaskKind>,
) -> Result<RoutingDecision> {
    let target_profile = match target {
        Some(name) => Some(
            profiles
                .iter()
                .find(|p| p.name == name)
                .ok_or_else(|| Error::Routing(format!("target column '{name}' not found")))?,
        ),
        None => None,
    };

    if let Some(task) = hint {
        return Ok(RoutingDecision {
            task,
            rule_fired: RoutingRule::R1,
            rationale: format!("The user requested a {task} task, overriding inference."),
        });
    }
    let Some(t) = target_profile else {
        return Ok(RoutingDecision {
            task: TaskKind::Unsupervised,
            rule_fired: RoutingRule::R2,
            rationale: "No target column was declared, so the task is unsupervised.".into(),
        });
    };
    let label_like = match t.kind {
        ColumnKind::Categorical | ColumnKind::Boolean => true,
        ColumnKind::Numeric => t.integral && t.n_distinct <= MAX_INTEGRAL_CLASSES,
        _ => false,
    };
    if label_like {
        Ok(RoutingDecision {
            task: TaskKind::Classification,
            rule_fired: RoutingRule::R3,
            rationale: format!(
                "Target '{}' is {} with {} distinct labels, so the task is classification.",
                t.name, t.kind, t.n_distinct
            ),
        })
    } else {
        Ok(RoutingDecision {
            task: TaskKind::Regression,
            rule_fired: RoutingRule::R4,
            rationale: format!(
                "Target '{}' is {} with {} distinct values, so the task is regression.",
                t.name, t.kind, t.n_distinct
            ),
        })
    }
}
