//! Planner backed by an OpenAI-compatible chat-completions endpoint.
//!
//! The model is asked for a JSON array of actions. Replies that do not parse
//! are retried with the parse error appended to the conversation. Transport
//! failures and exhausted retries fall back to the heuristic planner.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{HeuristicPlanner, Planner, PlannerContext, PlannerOutput};
use crate::actions::{Action, Plan, PlanOrigin, MAX_PLAN_ACTIONS};
use crate::error::{Error, Result};
use crate::routing::TaskKind;
use crate::table::{format_number, ColumnKind};

/// Environment variable holding the endpoint's API key.
pub const API_KEY_ENV: &str = "FORGE_LLM_API_KEY";

/// Prompt template, version 1. Placeholders are `{{name}}`.
pub const PROMPT_TEMPLATE: &str = include_str!("../../assets/planner_prompt_v1.txt");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmConfig {
    /// Full URL of the chat-completions route.
    pub endpoint: String,
    pub model: String,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
}

fn default_timeout() -> u64 {
    30
}

fn default_retries() -> u32 {
    2
}

impl LlmConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        LlmConfig {
            endpoint: endpoint.into(),
            model: model.into(),
            temperature: 0.0,
            timeout_secs: default_timeout(),
            max_retries: default_retries(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.endpoint.starts_with("http://") || self.endpoint.starts_with("https://")) {
            return Err(Error::Config(format!(
                "llm endpoint must be an http(s) URL, got '{}'",
                self.endpoint
            )));
        }
        if self.model.trim().is_empty() {
            return Err(Error::Config("llm model name is empty".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(Error::Config(format!(
                "llm temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        if self.timeout_secs == 0 {
            return Err(Error::Config("llm timeout must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    fn new(role: &str, content: impl Into<String>) -> Self {
        ChatMessage {
            role: role.into(),
            content: content.into(),
        }
    }
}

/// Request body of a chat-completions call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    pub messages: Vec<ChatMessage>,
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct TransportError(pub String);

/// Sends a chat request and returns the assistant's reply text.
pub trait ChatTransport: Send {
    fn complete(&self, request: &ChatRequest) -> std::result::Result<String, TransportError>;
}

/// Blocking HTTP transport with a hard timeout.
pub struct HttpTransport {
    agent: ureq::Agent,
    endpoint: String,
    api_key: String,
}

impl HttpTransport {
    pub fn new(endpoint: &str, api_key: &str, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        HttpTransport {
            agent,
            endpoint: endpoint.to_owned(),
            api_key: api_key.to_owned(),
        }
    }
}

impl ChatTransport for HttpTransport {
    fn complete(&self, request: &ChatRequest) -> std::result::Result<String, TransportError> {
        let reply: Value = self
            .agent
            .post(&self.endpoint)
            .header("Authorization", format!("Bearer {}", self.api_key))
            .send_json(request)
            .map_err(|e| TransportError(e.to_string()))?
            .into_body()
            .read_json()
            .map_err(|e| TransportError(format!("unreadable response: {e}")))?;
        reply["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_owned)
            .ok_or_else(|| TransportError("response has no choices[0].message.content".into()))
    }
}

pub struct LlmPlanner {
    cfg: LlmConfig,
    transport: Box<dyn ChatTransport>,
    fallback: HeuristicPlanner,
}

impl LlmPlanner {
    pub fn new(cfg: LlmConfig, transport: Box<dyn ChatTransport>, seed: u64) -> Self {
        LlmPlanner {
            cfg,
            transport,
            fallback: HeuristicPlanner::new(seed),
        }
    }

    /// Validates the settings and reads the API key from the environment.
    pub fn from_env(cfg: LlmConfig, seed: u64) -> Result<Self> {
        let key = std::env::var(API_KEY_ENV).unwrap_or_default();
        LlmPlanner::with_api_key(cfg, &key, seed)
    }

    /// An HTTP-backed planner. An empty key is a configuration error.
    pub fn with_api_key(cfg: LlmConfig, api_key: &str, seed: u64) -> Result<Self> {
        cfg.validate()?;
        if api_key.trim().is_empty() {
            return Err(Error::Config(format!("{API_KEY_ENV} is not set")));
        }
        let transport =
            HttpTransport::new(&cfg.endpoint, api_key, Duration::from_secs(cfg.timeout_secs));
        Ok(LlmPlanner::new(cfg, Box::new(transport), seed))
    }

    fn fall_back(&self, ctx: &PlannerContext, mut notes: Vec<String>) -> PlannerOutput {
        match self.fallback.propose(ctx) {
            Some(plan) => {
                notes.push("fell back to the heuristic planner".into());
                PlannerOutput::Plan { plan, notes }
            }
            None => {
                notes.push("heuristic fallback has nothing left to try".into());
                PlannerOutput::Exhausted { notes }
            }
        }
    }
}

impl Planner for LlmPlanner {
    fn name(&self) -> &'static str {
        "llm"
    }

    fn plan(&mut self, ctx: &PlannerContext) -> Result<PlannerOutput> {
        let cap = ctx.remaining_actions.clamp(1, MAX_PLAN_ACTIONS);
        let mut request = ChatRequest {
            model: self.cfg.model.clone(),
            temperature: self.cfg.temperature,
            messages: vec![ChatMessage::new("user", render_prompt(ctx))],
        };
        let mut notes = Vec::new();
        for attempt in 0..=self.cfg.max_retries {
            let reply = match self.transport.complete(&request) {
                Ok(r) => r,
                Err(e) => {
                    notes.push(format!("llm request failed: {e}"));
                    return Ok(self.fall_back(ctx, notes));
                }
            };
            match parse_reply(&reply) {
                Ok(actions) if actions.is_empty() => {
                    notes.push("llm reported nothing left to try".into());
                    return Ok(PlannerOutput::Exhausted { notes });
                }
                Ok(mut actions) => {
                    if actions.len() > cap {
                        notes.push(format!("llm proposed {} actions, kept {cap}", actions.len()));
                        actions.truncate(cap);
                    }
                    let plan = Plan::new(actions, PlanOrigin::Llm, ctx.iteration)?;
                    return Ok(PlannerOutput::Plan { plan, notes });
                }
                Err(e) => {
                    notes.push(format!("llm reply {} rejected: {e}", attempt + 1));
                    request.messages.push(ChatMessage::new("assistant", reply));
                    request.messages.push(ChatMessage::new(
                        "user",
                        format!(
                            "Your answer could not be used: {e}. \
                             Reply with a JSON array of action objects only."
                        ),
                    ));
                }
            }
        }
        Ok(self.fall_back(ctx, notes))
    }
}

/// Finds the first complete JSON array in `text`.
pub fn extract_json_array(text: &str) -> Option<Vec<Value>> {
    text.char_indices()
        .filter(|(_, c)| *c == '[')
        .find_map(|(i, _)| {
            let mut stream = serde_json::Deserializer::from_str(&text[i..]).into_iter::<Value>();
            match stream.next() {
                Some(Ok(Value::Array(items))) => Some(items),
                _ => None,
            }
        })
}

/// Parses a model reply into actions. Every element must be a valid action.
pub fn parse_reply(text: &str) -> Result<Vec<Action>> {
    let items = extract_json_array(text)
        .ok_or_else(|| Error::Planner("no JSON array found in the reply".into()))?;
    items
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            serde_json::from_value::<Action>(v)
                .map_err(|e| Error::Planner(format!("element {}: {e}", i + 1)))
        })
        .collect()
}

fn metric_name(task: TaskKind) -> &'static str {
    match task {
        TaskKind::Classification => "macro F1",
        TaskKind::Regression => "1 - relative absolute error",
        TaskKind::Unsupervised => "silhouette",
    }
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format_number((x * 1e4).round() / 1e4))
}

/// Fills the prompt template from the context. Only metadata is included.
pub fn render_prompt(ctx: &PlannerContext) -> String {
    let s = &ctx.schema;
    let mut schema = String::new();
    for p in &s.columns {
        let role = if s.target.as_deref() == Some(p.name.as_str()) {
            " [target]"
        } else {
            ""
        };
        let _ = write!(
            schema,
            "- {}{role}: {}, missing {}, distinct {}",
            p.name,
            p.kind,
            num(Some(p.missing_rate)),
            p.n_distinct
        );
        if p.kind == ColumnKind::Numeric {
            let _ = write!(
                schema,
                ", min {}, max {}, mean {}, sd {}, skew {}, has_zero {}",
                num(p.min),
                num(p.max),
                num(p.mean),
                num(p.stddev),
                num(p.skewness),
                p.has_zero
            );
            if let Some(c) = p.target_corr {
                let _ = write!(schema, ", |corr with target| {}", num(Some(c)));
            }
        }
        if !p.top_values.is_empty() {
            let top: Vec<String> = p.top_values.iter().map(|(v, n)| format!("{v} ({n})")).collect();
            let _ = write!(schema, ", top {}", top.join(", "));
        }
        schema.push('\n');
    }
    let mut history = String::new();
    for d in &ctx.history {
        let outcome = match (d.admissible, d.accepted) {
            (false, _) => "rejected by validation".to_owned(),
            (true, true) => format!("accepted, delta {}", num(d.metric_delta)),
            (true, false) => format!("not accepted, delta {}", num(d.metric_delta)),
        };
        let _ = writeln!(history, "- iteration {}: {} -> {outcome}", d.iteration, d.plan_summary());
    }
    if history.is_empty() {
        history.push_str("(none yet)\n");
    }
    PROMPT_TEMPLATE
        .replace("{{metric}}", metric_name(ctx.task))
        .replace("{{task}}", ctx.task.as_str())
        .replace("{{n_rows}}", &s.n_rows.to_string())
        .replace("{{target}}", s.target.as_deref().unwrap_or("(none)"))
        .replace("{{schema}}", schema.trim_end())
        .replace("{{baseline}}", &num(Some(ctx.baseline_metric)))
        .replace("{{best}}", &num(Some(ctx.best_metric)))
        .replace("{{history}}", history.trim_end())
        .replace(
            "{{max_actions}}",
            &ctx.remaining_actions.clamp(1, MAX_PLAN_ACTIONS).to_string(),
        )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::UnaryOp;

    #[test]
    fn extracts_array_after_prose() {
        let v = extract_json_array("Sure! [1, [2]] and then [3]").unwrap();
        assert_eq!(v.len(), 2);
        assert!(extract_json_array("no arrays [here").is_none());
        // a bracket inside prose that is not JSON is skipped
        let v = extract_json_array("see [note] then [{\"a\":1}]").unwrap();
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn parses_log1p_reply() {
        let a = parse_reply(r#"[{"op":"log1p","args":{"column":"age","out_name":"age_log"}}]"#)
            .unwrap();
        assert_eq!(a, vec![Action::unary(UnaryOp::Log1p, "age", "age_log")]);
    }

    #[test]
    fn unknown_op_is_rejected() {
        let e = parse_reply(r#"[{"op":"exp","args":{"column":"a","out_name":"b"}}]"#);
        assert!(e.is_err());
    }

    #[test]
    fn config_validation() {
        assert!(LlmConfig::new("http://localhost:1/v1/chat/completions", "m")
            .validate()
            .is_ok());
        assert!(LlmConfig::new("localhost", "m").validate().is_err());
        assert!(LlmConfig::new("https://x", " ").validate().is_err());
    }
}
