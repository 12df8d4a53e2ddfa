//! Command-line front end: argument parsing, progress lines and exit codes.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::mpsc;
use std::thread;

use clap::{Parser, ValueEnum};
use forge_core::cleaning::CleaningMode;
use forge_core::controller::{summary_line, ProgressEvent, RunConfig, RunOutcome, Runner};
use forge_core::planner::{LlmConfig, LlmPlanner, PlannerKind, API_KEY_ENV};
use forge_core::routing::TaskKind;
use forge_core::table::{ingest_csv, CsvOptions, MissingTokens};
use forge_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Classification,
    Regression,
    Unsupervised,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CleaningArg {
    Light,
    Aggressive,
    Timeseries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlannerArg {
    Heuristic,
    Llm,
}

/// Turn a raw CSV table into an improved, model-ready table.
#[derive(Debug, Clone, Parser)]
#[command(name = "forge", version)]
pub struct CliArgs {
    /// Input CSV file.
    pub input: PathBuf,
    /// Target column. Omit for unsupervised runs.
    #[arg(long)]
    pub target: Option<String>,
    /// Task kind; inferred from the target when omitted.
    #[arg(long, value_enum)]
    pub task: Option<TaskArg>,
    #[arg(long, value_enum, default_value = "light")]
    pub cleaning: CleaningArg,
    /// Time column, required by timeseries cleaning.
    #[arg(long)]
    pub time_column: Option<String>,
    /// Maximum number of accepted actions.
    #[arg(long, default_value_t = 20)]
    pub max_actions: usize,
    /// Absolute metric gain needed to accept a plan.
    #[arg(long, default_value_t = 0.001, allow_negative_numbers = true)]
    pub min_improvement: f64,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 300.0)]
    pub time_budget: f64,
    /// Non-improving iterations tolerated before stopping.
    #[arg(long, default_value_t = 3)]
    pub patience: usize,
    #[arg(long, value_enum, default_value = "heuristic")]
    pub planner: PlannerArg,
    /// Full URL of an OpenAI-compatible chat-completions route.
    #[arg(long)]
    pub llm_endpoint: Option<String>,
    #[arg(long)]
    pub llm_model: Option<String>,
    /// Learner used for scoring (cart_tree, linear_least_squares,
    /// logistic_regression, kmeans); chosen from the task when omitted.
    #[arg(long)]
    pub learner: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cross-validation folds.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value = "forge_out")]
    pub out_dir: PathBuf,
    /// Comma-separated spellings of a missing cell.
    #[arg(long, default_value = ",NA,N/A,null,NaN")]
    pub missing_tokens: String,
    /// Print only errors and the final summary.
    #[arg(long)]
    pub quiet: bool,
}

/// A usage problem, or a request for help/version text that exits cleanly.
#[derive(Debug)]
pub enum ParseOutcome {
    Usage(String),
    Display(String),
}

pub fn parse_args<I, T>(argv: I) -> Result<CliArgs, ParseOutcome>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = CliArgs::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                ParseOutcome::Display(e.to_string())
            }
            _ => ParseOutcome::Usage(e.to_string()),
        }
    })?;
    if args.planner == PlannerArg::Llm {
        if args.llm_endpoint.is_none() {
            return Err(usage("--planner llm requires --llm-endpoint <URL>"));
        }
        if args.llm_model.is_none() {
            return Err(usage("--planner llm requires --llm-model <NAME>"));
        }
    }
    if args.cleaning == CleaningArg::Timeseries && args.time_column.is_none() {
        return Err(usage("--cleaning timeseries requires --time-column <NAME>"));
    }
    Ok(args)
}

fn usage(msg: &str) -> ParseOutcome {
    ParseOutcome::Usage(format!(
        "error: {msg}\n\nUsage: forge [OPTIONS] <INPUT>\n\nFor more information, try '--help'.\n"
    ))
}

impl CliArgs {
    pub fn run_config(&self) -> RunConfig {
        let planner = match self.planner {
            PlannerArg::Heuristic => PlannerKind::Heuristic,
            PlannerArg::Llm => PlannerKind::Llm(LlmConfig::new(
                self.llm_endpoint.clone().unwrap_or_default(),
                self.llm_model.clone().unwrap_or_default(),
            )),
        };
        RunConfig {
            max_actions: self.max_actions,
            min_improvement: self.min_improvement,
            time_budget: self.time_budget,
            patience: self.patience,
            cleaning_mode: match self.cleaning {
                CleaningArg::Light => CleaningMode::Light,
                CleaningArg::Aggressive => CleaningMode::Aggressive,
                CleaningArg::Timeseries => CleaningMode::TimeSeries,
            },
            time_column: self.time_column.clone(),
            planner,
            seed: self.seed,
            task_hint: self.task.map(|t| match t {
                TaskArg::Classification => TaskKind::Classification,
                TaskArg::Regression => TaskKind::Regression,
                TaskArg::Unsupervised => TaskKind::Unsupervised,
            }),
            target: self.target.clone(),
            learner: self.learner.clone(),
            n_folds: self.folds,
            missing_tokens: self.missing().tokens().to_vec(),
        }
    }

    pub fn missing(&self) -> MissingTokens {
        MissingTokens::parse_list(&self.missing_tokens)
    }
}

/// Process exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_USAGE,
        Error::Contract(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

/// Exit status for a finished run: broken internal contracts still fail it.
pub fn outcome_code(outcome: &RunOutcome) -> i32 {
    if outcome.invariant_violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_INTERNAL
    }
}

/// The console line for one progress event.
pub fn render_event(event: &ProgressEvent) -> String {
    match event {
        ProgressEvent::CleanStep {
            name,
            columns,
            cells,
        } => format!("clean | {name}: {columns} column(s), {cells} cell(s) changed"),
        ProgressEvent::Routed(d) => {
            format!("route | {} via {:?}: {}", d.task, d.rule_fired, d.rationale)
        }
        ProgressEvent::Baseline(m) => format!("baseline | {} = {:.4}", m.kind, m.value),
        ProgressEvent::PlanProposed {
            iteration,
            origin,
            summary,
            notes,
        } => {
            let mut line = format!("iter {iteration} | plan ({origin}): {summary}");
            if !notes.is_empty() {
                line += &format!(" [{}]", notes.join("; "));
            }
            line
        }
        ProgressEvent::GroundPass { iteration, actions } => {
            format!("iter {iteration} | ground ok ({actions} action(s))")
        }
        ProgressEvent::GroundFail {
            iteration,
            code,
            message,
        } => format!("iter {iteration} | ground FAIL {code:?}: {message}"),
        ProgressEvent::Evaluated { iteration, metric } => {
            format!("iter {iteration} | eval {} = {:.4}", metric.kind, metric.value)
        }
        ProgressEvent::Accepted {
            iteration,
            delta,
            best,
        } => format!("iter {iteration} | accept Δ={delta:+.4} (best {best:.4})"),
        ProgressEvent::Rejected {
            iteration,
            delta: Some(delta),
            best,
        } => format!("iter {iteration} | reject Δ={delta:+.4} (best {best:.4})"),
        ProgressEvent::Rejected {
            iteration,
            delta: None,
            best,
        } => format!("iter {iteration} | reject (best {best:.4})"),
        ProgressEvent::IterationError { iteration, message } => {
            format!("iter {iteration} | error: {message}")
        }
        ProgressEvent::Exhausted { notes } if notes.is_empty() => "planner | exhausted".into(),
        ProgressEvent::Exhausted { notes } => {
            format!("planner | exhausted [{}]", notes.join("; "))
        }
        ProgressEvent::Stopped { reason, detail } => format!("stop: {reason} ({detail})"),
    }
}

fn is_error(event: &ProgressEvent) -> bool {
    matches!(event, ProgressEvent::IterationError { .. })
}

/// Runs the whole command and returns the exit status.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match parse_args(argv) {
        Ok(a) => a,
        Err(ParseOutcome::Display(text)) => {
            let _ = write!(out, "{text}");
            return EXIT_OK;
        }
        Err(ParseOutcome::Usage(text)) => {
            let _ = write!(err, "{text}");
            return EXIT_USAGE;
        }
    };
    let config = args.run_config();
    if let Err(e) = config.validate() {
        let _ = writeln!(err, "error: {e}");
        return exit_code(&e);
    }
    let mut runner = Runner::new(config.clone()).with_out_dir(&args.out_dir);
    if let PlannerKind::Llm(cfg) = &config.planner {
        let key = std::env::var(API_KEY_ENV).unwrap_or_default();
        match LlmPlanner::with_api_key(cfg.clone(), &key, config.seed) {
            Ok(p) => runner = runner.with_planner(Box::new(p)),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return exit_code(&e);
            }
        }
    }

    let csv = CsvOptions {
        missing: args.missing(),
        ..CsvOptions::default()
    };
    let table = match ingest_csv(&args.input, &csv) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };

    let (tx, rx) = mpsc::channel();
    let worker = thread::spawn(move || runner.with_events(tx).run(&table));
    for event in rx {
        if !args.quiet || is_error(&event) {
            let _ = writeln!(out, "{}", render_event(&event));
        }
    }
    let result = match worker.join() {
        Ok(r) => r,
        Err(_) => {
            let _ = writeln!(err, "error: the run aborted unexpectedly");
            return EXIT_INTERNAL;
        }
    };
    match result {
        Ok(outcome) => {
            let _ = writeln!(out, "{}", summary_line(&outcome.summary));
            if !args.quiet {
                let _ = writeln!(out, "outputs written to {}", args.out_dir.display());
            }
            for v in &outcome.invariant_violations {
                let _ = writeln!(err, "internal error: {v}");
            }
            outcome_code(&outcome)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
