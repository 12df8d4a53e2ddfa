//! The search loop: clean, route, evaluate a baseline, then repeatedly plan,
//! ground, execute and evaluate until a stop rule fires.

mod log;
mod report;

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::Sender;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::actions::{
    action_signature, execute_plan, ground_plan, GroundingCode, GroundingReport, Plan, PlanOrigin,
};
use crate::cleaning::{clean, CleanOptions, CleaningMode, CleaningReport};
use crate::error::{Error, Result};
use crate::eval::{
    evaluate, EvalResult, Learner, LearnerRegistry, LearnerSpec, Metric, DEFAULT_FOLDS,
};
use crate::planner::{Planner, PlannerContext, PlannerKind, PlannerOutput, PlannerRegistry};
use crate::routing::{route_task, RoutingDecision, TaskKind};
use crate::table::{profile, write_csv, MissingTokens, Schema, Table};

pub use log::{
    mask_volatile_json, read_log, ExperienceRecord, ExperienceStore, LogLine, RunHeader,
    LOG_FORMAT_VERSION,
};
pub use report::{
    mask_volatile_report, render_report, summary_line, RunSummary, SECTION_HEADINGS,
};

pub const EXPERIENCE_FILE: &str = "experience.jsonl";
pub const REPORT_FILE: &str = "report.md";
pub const BEST_TABLE_FILE: &str = "best_table.csv";
pub const CONFIG_FILE: &str = "run_config.json";

/// Consecutive inadmissible plans tolerated before the planner is treated as
/// exhausted: the first plan plus two re-plans.
const MAX_CONSECUTIVE_INADMISSIBLE: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub max_actions: usize,
    /// Absolute metric gain an iteration must reach to be accepted.
    pub min_improvement: f64,
    /// Seconds. Checked before each iteration; a long evaluation may overshoot.
    pub time_budget: f64,
    pub patience: usize,
    pub cleaning_mode: CleaningMode,
    pub time_column: Option<String>,
    pub planner: PlannerKind,
    pub seed: u64,
    pub task_hint: Option<TaskKind>,
    pub target: Option<String>,
    /// Learner name; the default depends on the routed task.
    pub learner: Option<String>,
    pub n_folds: usize,
    pub missing_tokens: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_actions: 20,
            min_improvement: 0.001,
            time_budget: 300.0,
            patience: 3,
            cleaning_mode: CleaningMode::Light,
            time_column: None,
            planner: PlannerKind::Heuristic,
            seed: 0,
            task_hint: None,
            target: None,
            learner: None,
            n_folds: DEFAULT_FOLDS,
            missing_tokens: MissingTokens::default().tokens().to_vec(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_actions == 0 {
            return Err(Error::Config("max_actions must be at least 1".into()));
        }
        if !(self.time_budget > 0.0 && self.time_budget.is_finite()) {
            return Err(Error::Config(format!(
                "time_budget must be a positive number of seconds, got {}",
                self.time_budget
            )));
        }
        if self.patience == 0 {
            return Err(Error::Config("patience must be at least 1".into()));
        }
        if !self.min_improvement.is_finite() {
            return Err(Error::Config("min_improvement must be finite".into()));
        }
        if self.n_folds < 2 {
            return Err(Error::Config("at least 2 folds are required".into()));
        }
        if self.cleaning_mode == CleaningMode::TimeSeries && self.time_column.is_none() {
            return Err(Error::Config("timeseries cleaning needs a time column".into()));
        }
        match (self.task_hint, &self.target) {
            (Some(TaskKind::Unsupervised), Some(t)) => {
                return Err(Error::Config(format!(
                    "an unsupervised task cannot have a target (got '{t}')"
                )));
            }
            (Some(task @ (TaskKind::Classification | TaskKind::Regression)), None) => {
                return Err(Error::Config(format!("a {task} task needs a target")));
            }
            _ => {}
        }
        if let PlannerKind::Llm(cfg) = &self.planner {
            cfg.validate()?;
        }
        Ok(())
    }

    pub fn missing(&self) -> MissingTokens {
        MissingTokens::new(self.missing_tokens.iter().cloned())
    }
}

/// Source of elapsed time, injectable so budget tests do not sleep.
pub trait Clock: Send {
    /// Seconds since an arbitrary fixed origin.
    fn now(&self) -> f64;
}

pub struct SystemClock(Instant);

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock(Instant::now())
    }
}

impl Clock for SystemClock {
    fn now(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Advances by a fixed step on every reading.
pub struct SteppingClock {
    step: f64,
    readings: AtomicU64,
}

impl SteppingClock {
    pub fn new(step: f64) -> Self {
        SteppingClock {
            step,
            readings: AtomicU64::new(0),
        }
    }
}

impl Clock for SteppingClock {
    fn now(&self) -> f64 {
        self.readings.fetch_add(1, Ordering::Relaxed) as f64 * self.step
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxActions,
    TimeBudget,
    Patience,
    #[serde(rename = "planner exhausted")]
    PlannerExhausted,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::MaxActions => "max_actions",
            StopReason::TimeBudget => "time_budget",
            StopReason::Patience => "patience",
            StopReason::PlannerExhausted => "planner exhausted",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct RunState {
    pub working_table: Table,
    pub best_table: Table,
    pub best_metric: f64,
    pub actions_used: usize,
    pub iteration: usize,
    pub non_improving_streak: usize,
    /// Seconds since the run started, as of the last stop check.
    pub clock: f64,
    pub planner_exhausted: bool,
    pub consecutive_inadmissible: usize,
}

impl RunState {
    pub fn new(table: Table, metric: f64) -> Self {
        RunState {
            working_table: table.clone(),
            best_table: table,
            best_metric: metric,
            actions_used: 0,
            iteration: 0,
            non_improving_streak: 0,
            clock: 0.0,
            planner_exhausted: false,
            consecutive_inadmissible: 0,
        }
    }
}

/// First stop rule that applies, in priority order.
pub fn should_stop(state: &RunState, config: &RunConfig) -> Option<StopReason> {
    if state.actions_used >= config.max_actions {
        Some(StopReason::MaxActions)
    } else if state.clock >= config.time_budget {
        Some(StopReason::TimeBudget)
    } else if state.non_improving_streak >= config.patience {
        Some(StopReason::Patience)
    } else if state.planner_exhausted {
        Some(StopReason::PlannerExhausted)
    } else {
        None
    }
}

/// Lifecycle notifications, delivered in order while the run progresses.
#[derive(Debug, Clone, PartialEq)]
pub enum ProgressEvent {
    CleanStep {
        name: String,
        columns: usize,
        cells: usize,
    },
    Routed(RoutingDecision),
    Baseline(Metric),
    PlanProposed {
        iteration: usize,
        origin: PlanOrigin,
        summary: String,
        notes: Vec<String>,
    },
    GroundPass {
        iteration: usize,
        actions: usize,
    },
    GroundFail {
        iteration: usize,
        code: GroundingCode,
        message: String,
    },
    Evaluated {
        iteration: usize,
        metric: Metric,
    },
    Accepted {
        iteration: usize,
        delta: f64,
        best: f64,
    },
    Rejected {
        iteration: usize,
        delta: Option<f64>,
        best: f64,
    },
    IterationError {
        iteration: usize,
        message: String,
    },
    Exhausted {
        notes: Vec<String>,
    },
    Stopped {
        reason: StopReason,
        detail: String,
    },
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub best_table: Table,
    pub header: RunHeader,
    pub log: Vec<ExperienceRecord>,
    pub summary: RunSummary,
    pub report: String,
    /// best_metric after the baseline and after every iteration.
    pub best_history: Vec<f64>,
    pub actions_used: usize,
    /// Broken internal contracts seen during the loop. They are logged as
    /// rejected iterations and reported to the caller.
    pub invariant_violations: Vec<String>,
}

impl RunOutcome {
    pub fn stop_reason(&self) -> StopReason {
        self.summary.stop_reason
    }
}

/// Configures and executes one run.
pub struct Runner {
    config: RunConfig,
    planners: PlannerRegistry,
    learners: LearnerRegistry,
    planner: Option<Box<dyn Planner>>,
    clock: Box<dyn Clock>,
    events: Option<Sender<ProgressEvent>>,
    out_dir: Option<PathBuf>,
}

impl Runner {
    pub fn new(config: RunConfig) -> Self {
        Runner {
            config,
            planners: PlannerRegistry::default(),
            learners: LearnerRegistry::default(),
            planner: None,
            clock: Box::new(SystemClock::default()),
            events: None,
            out_dir: None,
        }
    }

    /// Uses this planner instead of building one from the config.
    pub fn with_planner(mut self, planner: Box<dyn Planner>) -> Self {
        self.planner = Some(planner);
        self
    }

    pub fn with_planner_registry(mut self, registry: PlannerRegistry) -> Self {
        self.planners = registry;
        self
    }

    pub fn with_learner_registry(mut self, registry: LearnerRegistry) -> Self {
        self.learners = registry;
        self
    }

    pub fn with_clock(mut self, clock: Box<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    pub fn with_events(mut self, tx: Sender<ProgressEvent>) -> Self {
        self.events = Some(tx);
        self
    }

    /// Writes the four run artifacts into `dir` (created if needed).
    pub fn with_out_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.out_dir = Some(dir.into());
        self
    }

    fn emit(&self, event: ProgressEvent) {
        if let Some(tx) = &self.events {
            // a dropped receiver only means nobody is listening
            let _ = tx.send(event);
        }
    }

    pub fn run(mut self, input: &Table) -> Result<RunOutcome> {
        self.config.validate()?;
        if input.n_rows() == 0 || input.n_cols() == 0 {
            return Err(Error::EmptyInput("the input table has no cells".into()));
        }
        let start = self.clock.now();
        if let Some(dir) = &self.out_dir {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let text = serde_json::to_string_pretty(&self.config)
                .map_err(|e| Error::Contract(format!("config not serializable: {e}")))?;
            let path = dir.join(CONFIG_FILE);
            std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        }
        let mut planner = match self.planner.take() {
            Some(p) => p,
            None => self.planners.build(&self.config.planner, self.config.seed)?,
        };

        if let Some(t) = &self.config.target {
            if input.column(t).is_none() {
                return Err(Error::Routing(format!("target column '{t}' not found")));
            }
        }
        let input = input.with_target(self.config.target.as_deref())?;
        let features_before = input.n_features();
        let (cleaned, cleaning) = self.clean_stage(&input)?;
        let routing = route_task(&profile(&cleaned), cleaned.target(), self.config.task_hint)?;
        self.emit(ProgressEvent::Routed(routing.clone()));
        let task = routing.task;
        let spec = match &self.config.learner {
            Some(name) => LearnerSpec::named(name),
            None => LearnerSpec::default_for(task),
        };
        let learner = self.learners.build(&spec)?;
        if !learner.supports(task) {
            return Err(Error::Config(format!(
                "learner {} does not support {task}",
                learner.name()
            )));
        }
        let baseline = evaluate(&cleaned, task, learner.as_ref(), self.config.n_folds, self.config.seed)?;
        self.emit(ProgressEvent::Baseline(baseline.primary_metric));

        let header = RunHeader {
            version: LOG_FORMAT_VERSION,
            config: self.config.clone(),
            input_rows: input.n_rows(),
            input_columns: input.n_cols(),
            cleaning,
            routing,
            baseline: baseline.clone(),
            timestamp: now_rfc3339(),
        };
        let mut store = match &self.out_dir {
            Some(dir) => ExperienceStore::create(&dir.join(EXPERIENCE_FILE))?,
            None => ExperienceStore::in_memory(),
        };
        store.append(&LogLine::Header(Box::new(header.clone())))?;

        let mut lp = Loop {
            runner: &self,
            planner: planner.as_mut(),
            learner: learner.as_ref(),
            task,
            baseline: baseline.primary_metric.value,
            state: RunState::new(cleaned, baseline.primary_metric.value),
            log: Vec::new(),
            best_history: vec![baseline.primary_metric.value],
            violations: Vec::new(),
            store: &mut store,
        };
        let stop_reason = loop {
            lp.state.clock = self.clock.now() - start;
            if let Some(reason) = should_stop(&lp.state, &self.config) {
                break reason;
            }
            lp.iterate()?;
        };
        let detail = lp.stop_detail(stop_reason);
        let Loop {
            state,
            log,
            best_history,
            violations,
            ..
        } = lp;
        self.emit(ProgressEvent::Stopped {
            reason: stop_reason,
            detail,
        });

        let summary = RunSummary {
            features_before,
            features_after: state.best_table.n_features(),
            baseline_metric: baseline.primary_metric.value,
            best_metric: state.best_metric,
            metric: baseline.primary_metric.kind,
            stop_reason,
            actions_used: state.actions_used,
            iterations: state.iteration,
            elapsed: self.clock.now() - start,
        };
        let report = render_report(&header, &log, &summary);
        if let Some(dir) = &self.out_dir {
            let path = dir.join(REPORT_FILE);
            std::fs::write(&path, &report).map_err(|e| Error::io(&path, e))?;
            write_csv(&state.best_table, &dir.join(BEST_TABLE_FILE))?;
        }
        Ok(RunOutcome {
            best_table: state.best_table,
            header,
            log,
            summary,
            report,
            best_history,
            actions_used: state.actions_used,
            invariant_violations: violations,
        })
    }

    fn clean_stage(&self, input: &Table) -> Result<(Table, CleaningReport)> {
        let opts = CleanOptions {
            mode: self.config.cleaning_mode,
            time_column: self.config.time_column.clone(),
            missing: self.config.missing(),
        };
        let (cleaned, report) = clean(input, &opts)?;
        for step in &report.steps {
            self.emit(ProgressEvent::CleanStep {
                name: step.name.clone(),
                columns: step.columns.len(),
                cells: step.cells_changed,
            });
        }
        if cleaned.n_rows() < 2 {
            return Err(Error::Cleaning(format!(
                "{} row(s) left after cleaning; at least 2 are needed",
                cleaned.n_rows()
            )));
        }
        if cleaned.n_features() == 0 {
            return Err(Error::Cleaning("no feature column left after cleaning".into()));
        }
        Ok((cleaned, report))
    }
}

fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

/// Mutable state of the iteration loop.
struct Loop<'a> {
    runner: &'a Runner,
    planner: &'a mut dyn Planner,
    learner: &'a dyn Learner,
    task: TaskKind,
    baseline: f64,
    state: RunState,
    log: Vec<ExperienceRecord>,
    best_history: Vec<f64>,
    violations: Vec<String>,
    store: &'a mut ExperienceStore,
}

/// How an admissible plan fared after grounding.
enum Trial {
    Scored(Table, EvalResult),
    Failed { executed: bool, note: String },
}

impl Loop<'_> {
    fn config(&self) -> &RunConfig {
        &self.runner.config
    }

    fn context(&self) -> PlannerContext {
        PlannerContext {
            task: self.task,
            schema: Schema::of(&self.state.working_table),
            baseline_metric: self.baseline,
            best_metric: self.state.best_metric,
            history: self.log.iter().map(ExperienceRecord::digest).collect(),
            iteration: self.state.iteration + 1,
            remaining_actions: self.config().max_actions - self.state.actions_used,
        }
    }

    fn stop_detail(&self, reason: StopReason) -> String {
        let c = self.config();
        match reason {
            StopReason::MaxActions => {
                format!("{} of {} actions used", self.state.actions_used, c.max_actions)
            }
            StopReason::TimeBudget => format!("budget of {} s reached", c.time_budget),
            StopReason::Patience => {
                format!("{} non-improving iterations", self.state.non_improving_streak)
            }
            StopReason::PlannerExhausted => {
                if self.state.consecutive_inadmissible >= MAX_CONSECUTIVE_INADMISSIBLE {
                    format!("{MAX_CONSECUTIVE_INADMISSIBLE} consecutive inadmissible plans")
                } else {
                    "no untried candidates left".into()
                }
            }
        }
    }

    fn record(&mut self, rec: ExperienceRecord) -> Result<()> {
        self.store.append(&LogLine::Iteration(Box::new(rec.clone())))?;
        self.log.push(rec);
        self.best_history.push(self.state.best_metric);
        Ok(())
    }

    /// One planner call and everything that follows from it. Only log-write
    /// failures escape; every other problem becomes a rejected iteration.
    fn iterate(&mut self) -> Result<()> {
        let ctx = self.context();
        let iteration = ctx.iteration;
        let called = catch_unwind(AssertUnwindSafe(|| self.planner.plan(&ctx)));
        let (mut plan, mut notes) = match called {
            Ok(Ok(PlannerOutput::Plan { plan, notes })) => (plan, notes),
            Ok(Ok(PlannerOutput::Exhausted { notes })) => {
                self.state.planner_exhausted = true;
                self.runner.emit(ProgressEvent::Exhausted { notes });
                return Ok(());
            }
            Ok(Err(e)) => return self.planner_failure(iteration, format!("planner error: {e}")),
            Err(p) => {
                return self.planner_failure(
                    iteration,
                    format!("planner panicked: {}", panic_message(p)),
                )
            }
        };
        self.state.iteration = iteration;
        plan.iteration = iteration;
        if plan.len() > ctx.remaining_actions {
            notes.push(format!(
                "plan truncated from {} to {} action(s) to fit the action budget",
                plan.len(),
                ctx.remaining_actions
            ));
            plan.truncate(ctx.remaining_actions);
        }
        self.runner.emit(ProgressEvent::PlanProposed {
            iteration,
            origin: plan.origin,
            summary: plan.actions().iter().map(action_signature).collect::<Vec<_>>().join("; "),
            notes: notes.clone(),
        });

        let grounding = ground_plan(&plan, &ctx.schema);
        let before = self.state.best_metric;
        let mut rec = ExperienceRecord {
            iteration,
            plan: Some(plan.clone()),
            grounding: None,
            executed: false,
            metric_before: before,
            metric_after: None,
            accepted: false,
            planner_origin: Some(plan.origin),
            evaluation: None,
            timestamp: String::new(),
            note: notes.join("; "),
        };
        if !grounding.plan_admissible {
            for (_, code, message) in grounding.failures() {
                self.runner.emit(ProgressEvent::GroundFail {
                    iteration,
                    code,
                    message: message.to_owned(),
                });
            }
            self.state.consecutive_inadmissible += 1;
            self.state.non_improving_streak += 1;
            if self.state.consecutive_inadmissible >= MAX_CONSECUTIVE_INADMISSIBLE {
                self.state.planner_exhausted = true;
            }
            push_note(&mut rec.note, "plan inadmissible; re-planning");
            rec.grounding = Some(grounding);
            rec.timestamp = now_rfc3339();
            return self.record(rec);
        }
        self.state.consecutive_inadmissible = 0;
        self.runner.emit(ProgressEvent::GroundPass {
            iteration,
            actions: plan.len(),
        });
        rec.grounding = Some(grounding.clone());

        match self.trial(&plan, &grounding) {
            Trial::Scored(table, eval) => {
                let after = eval.primary_metric.value;
                let delta = after - before;
                rec.executed = true;
                rec.metric_after = Some(after);
                self.runner.emit(ProgressEvent::Evaluated {
                    iteration,
                    metric: eval.primary_metric,
                });
                rec.evaluation = Some(eval);
                if delta >= self.config().min_improvement {
                    rec.accepted = true;
                    self.state.best_metric = after;
                    self.state.best_table = table.clone();
                    self.state.working_table = table;
                    self.state.actions_used += plan.len();
                    self.state.non_improving_streak = 0;
                    self.runner.emit(ProgressEvent::Accepted {
                        iteration,
                        delta,
                        best: after,
                    });
                } else {
                    self.state.non_improving_streak += 1;
                    push_note(
                        &mut rec.note,
                        &format!(
                            "gain {delta:+.4} below the {} threshold",
                            self.config().min_improvement
                        ),
                    );
                    self.runner.emit(ProgressEvent::Rejected {
                        iteration,
                        delta: Some(delta),
                        best: before,
                    });
                }
            }
            Trial::Failed { executed, note } => {
                rec.executed = executed;
                self.state.non_improving_streak += 1;
                self.runner.emit(ProgressEvent::IterationError {
                    iteration,
                    message: note.clone(),
                });
                self.runner.emit(ProgressEvent::Rejected {
                    iteration,
                    delta: None,
                    best: before,
                });
                push_note(&mut rec.note, &note);
            }
        }
        rec.timestamp = now_rfc3339();
        self.record(rec)
    }

    fn planner_failure(&mut self, iteration: usize, note: String) -> Result<()> {
        self.state.iteration = iteration;
        self.state.non_improving_streak += 1;
        self.runner.emit(ProgressEvent::IterationError {
            iteration,
            message: note.clone(),
        });
        let rec = ExperienceRecord {
            iteration,
            plan: None,
            grounding: None,
            executed: false,
            metric_before: self.state.best_metric,
            metric_after: None,
            accepted: false,
            planner_origin: None,
            evaluation: None,
            timestamp: now_rfc3339(),
            note,
        };
        self.record(rec)
    }

    /// Executes on the working table and scores the result.
    fn trial(&mut self, plan: &Plan, grounding: &GroundingReport) -> Trial {
        let working = &self.state.working_table;
        let executed = catch_unwind(AssertUnwindSafe(|| execute_plan(plan, working)));
        let table = match executed {
            Ok(Ok(t)) => t,
            Ok(Err(e)) => {
                if matches!(e, Error::Contract(_)) {
                    self.violations.push(format!("iteration {}: {e}", plan.iteration));
                }
                return Trial::Failed {
                    executed: false,
                    note: format!("execution failed: {e}"),
                };
            }
            Err(p) => {
                let msg = format!("execution panicked: {}", panic_message(p));
                self.violations.push(format!("iteration {}: {msg}", plan.iteration));
                return Trial::Failed {
                    executed: false,
                    note: msg,
                };
            }
        };
        if table.schema_signature() != grounding.predicted {
            self.violations.push(format!(
                "iteration {}: executed schema differs from the grounded prediction",
                plan.iteration
            ));
        }
        let c = self.config();
        let scored = catch_unwind(AssertUnwindSafe(|| {
            evaluate(&table, self.task, self.learner, c.n_folds, c.seed)
        }));
        match scored {
            Ok(Ok(eval)) if eval.primary_metric.value.is_finite() => Trial::Scored(table, eval),
            Ok(Ok(eval)) => Trial::Failed {
                executed: true,
                note: format!("evaluation gave a non-finite score {}", eval.primary_metric.value),
            },
            Ok(Err(e)) => Trial::Failed {
                executed: true,
                note: format!("evaluation failed: {e}"),
            },
            Err(p) => Trial::Failed {
                executed: true,
                note: format!("evaluation panicked: {}", panic_message(p)),
            },
        }
    }
}

fn push_note(note: &mut String, text: &str) {
    if !note.is_empty() {
        note.push_str("; ");
    }
    note.push_str(text);
}

/// Directory-relative paths of the run artifacts.
pub fn artifact_paths(dir: &Path) -> [PathBuf; 4] {
    [
        dir.join(EXPERIENCE_FILE),
        dir.join(REPORT_FILE),
        dir.join(BEST_TABLE_FILE),
        dir.join(CONFIG_FILE),
    ]
}
