use std::collections::VecDeque;
use std::io::Write;
use std::sync::mpsc;

use forge_core::actions::{Action, BinaryOp, Plan, PlanOrigin, UnaryOp};
use forge_core::controller::{
    mask_volatile_json, mask_volatile_report, read_log, should_stop, LogLine, ProgressEvent,
    RunConfig, RunState, Runner, SteppingClock, StopReason, EXPERIENCE_FILE, SECTION_HEADINGS,
};
use forge_core::planner::{Planner, PlannerContext, PlannerOutput};
use forge_core::synth::planted_interaction;
use forge_core::table::{Column, Table};
use forge_core::{Error, Result};

enum Step {
    Out(PlannerOutput),
    Fail,
    Panic,
}

/// Replays a fixed script, then reports exhaustion.
struct Scripted(VecDeque<Step>);

impl Planner for Scripted {
    fn name(&self) -> &'static str {
        "scripted"
    }

    fn plan(&mut self, ctx: &PlannerContext) -> Result<PlannerOutput> {
        match self.0.pop_front() {
            Some(Step::Out(PlannerOutput::Plan { mut plan, notes })) => {
                plan.iteration = ctx.iteration;
                Ok(PlannerOutput::Plan { plan, notes })
            }
            Some(Step::Out(o)) => Ok(o),
            Some(Step::Fail) => Err(Error::Planner("scripted failure".into())),
            Some(Step::Panic) => panic!("scripted panic"),
            None => Ok(PlannerOutput::Exhausted { notes: vec![] }),
        }
    }
}

fn plan(actions: Vec<Action>) -> Step {
    Step::Out(PlannerOutput::Plan {
        plan: Plan::new(actions, PlanOrigin::Replay, 0).unwrap(),
        notes: vec![],
    })
}

fn div_by_k() -> Step {
    plan(vec![Action::binary(BinaryOp::Div, "x1", "k", "q")])
}

fn product() -> Step {
    plan(vec![Action::binary(BinaryOp::Mul, "x1", "x2", "x1_x_x2")])
}

/// Planted-interaction data plus a column `k` that contains zeros.
fn input() -> Table {
    let base = planted_interaction(120, 3).table;
    let mut cols: Vec<Column> = base.columns().cloned().collect();
    cols.push(Column::numeric("k", (0..120).map(|i| Some((i % 3) as f64)).collect()).unwrap());
    Table::new(cols).unwrap()
}

fn config() -> RunConfig {
    RunConfig {
        seed: 7,
        target: Some("y".into()),
        ..RunConfig::default()
    }
}

fn scripted(steps: Vec<Step>) -> Box<dyn Planner> {
    Box::new(Scripted(steps.into()))
}

fn state(actions_used: usize, clock: f64, streak: usize) -> RunState {
    let mut s = RunState::new(input(), 0.5);
    s.actions_used = actions_used;
    s.clock = clock;
    s.non_improving_streak = streak;
    s
}

#[test]
fn stop_rules_in_priority_order() {
    let c = RunConfig::default();
    assert_eq!(should_stop(&state(20, 0.0, 0), &c), Some(StopReason::MaxActions));
    assert_eq!(should_stop(&state(5, 301.0, 0), &c), Some(StopReason::TimeBudget));
    assert_eq!(should_stop(&state(5, 10.0, 3), &c), Some(StopReason::Patience));
    assert_eq!(should_stop(&state(20, 301.0, 3), &c), Some(StopReason::MaxActions));
    let mut s = state(0, 0.0, 0);
    assert_eq!(should_stop(&s, &c), None);
    s.planner_exhausted = true;
    assert_eq!(should_stop(&s, &c), Some(StopReason::PlannerExhausted));
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        RunConfig {
            max_actions: 0,
            ..config()
        },
        RunConfig {
            time_budget: 0.0,
            ..config()
        },
        RunConfig {
            patience: 0,
            ..config()
        },
    ];
    for c in bad {
        let err = Runner::new(c).run(&input()).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
    }
}

#[test]
fn missing_target_is_a_routing_error() {
    let c = RunConfig {
        target: Some("nope".into()),
        ..config()
    };
    assert!(matches!(Runner::new(c).run(&input()), Err(Error::Routing(_))));
}

#[test]
fn exhausted_on_first_call_returns_cleaned_baseline() {
    let out = Runner::new(config())
        .with_planner(scripted(vec![]))
        .run(&input())
        .unwrap();
    assert_eq!(out.stop_reason(), StopReason::PlannerExhausted);
    assert!(out.log.is_empty());
    assert_eq!(out.summary.best_metric, out.summary.baseline_metric);
    assert_eq!(out.best_table.n_cols(), 5);
    assert!(out.report.contains("stop: planner exhausted"));
}

#[test]
fn inadmissible_plans_run_out_patience() {
    let out = Runner::new(config())
        .with_planner(scripted(vec![div_by_k(), div_by_k(), div_by_k(), product()]))
        .run(&input())
        .unwrap();
    assert_eq!(out.stop_reason(), StopReason::Patience);
    assert_eq!(out.actions_used, 0);
    assert_eq!(out.log.len(), 3);
    for rec in &out.log {
        assert!(!rec.executed);
        assert!(rec.metric_after.is_none());
        assert!(!rec.grounding.as_ref().unwrap().plan_admissible);
    }
}

#[test]
fn three_inadmissible_plans_exhaust_the_planner_when_patience_is_larger() {
    let c = RunConfig {
        patience: 10,
        ..config()
    };
    let out = Runner::new(c)
        .with_planner(scripted(vec![div_by_k(), div_by_k(), div_by_k(), product()]))
        .run(&input())
        .unwrap();
    assert_eq!(out.stop_reason(), StopReason::PlannerExhausted);
    assert_eq!(out.log.len(), 3);
}

#[test]
fn grounding_failure_then_success_is_reported() {
    let out = Runner::new(config())
        .with_planner(scripted(vec![div_by_k(), product()]))
        .run(&input())
        .unwrap();
    assert_eq!(out.log.len(), 2);
    assert!(out.log[1].accepted);
    let section = out
        .report
        .split(SECTION_HEADINGS[2])
        .nth(1)
        .and_then(|s| s.split(SECTION_HEADINGS[3]).next())
        .unwrap();
    assert_eq!(section.matches("G3 failed").count(), 1, "{section}");
    assert!(section.contains("division by zero in div(x1,k)"));
    assert!(section.contains("Iteration 2: all 1 action(s) passed grounding."));
    assert!(out.report.contains("- Iteration 2: Created x1_x_x2"), "{}", out.report);
}

#[test]
fn planner_errors_and_panics_become_rejected_iterations() {
    let c = RunConfig {
        patience: 5,
        ..config()
    };
    let out = Runner::new(c)
        .with_planner(scripted(vec![Step::Fail, Step::Panic, product()]))
        .run(&input())
        .unwrap();
    assert_eq!(out.log.len(), 3);
    assert!(out.log[0].plan.is_none() && out.log[0].note.contains("scripted failure"));
    assert!(out.log[1].note.contains("panicked"));
    assert!(out.log[2].accepted);
    assert!(out.invariant_violations.is_empty());
}

#[test]
fn unreachable_improvement_stops_on_patience() {
    let c = RunConfig {
        min_improvement: 1e9,
        ..config()
    };
    let out = Runner::new(c).run(&input()).unwrap();
    assert_eq!(out.stop_reason(), StopReason::Patience);
    assert_eq!(out.log.len(), 3);
    assert_eq!(out.actions_used, 0);
    assert!(out.log.iter().all(|r| !r.accepted));
}

#[test]
fn one_action_budget_stops_after_first_accept() {
    let c = RunConfig {
        max_actions: 1,
        ..config()
    };
    let out = Runner::new(c).run(&input()).unwrap();
    assert_eq!(out.stop_reason(), StopReason::MaxActions);
    assert_eq!(out.actions_used, 1);
    assert!(out.log.last().unwrap().accepted);
    assert_eq!(out.log.iter().filter(|r| r.accepted).count(), 1);
}

#[test]
fn time_budget_checked_before_each_iteration() {
    // start reading 0, then 0.6 before iteration 1, 1.2 before iteration 2
    let c = RunConfig {
        time_budget: 1.0,
        ..config()
    };
    let out = Runner::new(c)
        .with_clock(Box::new(SteppingClock::new(0.6)))
        .run(&input())
        .unwrap();
    assert_eq!(out.stop_reason(), StopReason::TimeBudget);
    assert_eq!(out.log.len(), 1);
}

#[test]
fn accepted_records_meet_the_threshold() {
    let out = Runner::new(config()).run(&input()).unwrap();
    for rec in &out.log {
        if rec.executed {
            assert!(rec.grounding.as_ref().unwrap().plan_admissible);
        }
        if rec.accepted {
            assert!(rec.metric_after.unwrap() - rec.metric_before >= 0.001);
        }
    }
    assert!(out.best_history.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn experience_file_has_header_plus_one_line_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let (tx, rx) = mpsc::channel();
    let out = Runner::new(config())
        .with_out_dir(dir.path())
        .with_events(tx)
        .run(&input())
        .unwrap();
    let lines = read_log(&dir.path().join(EXPERIENCE_FILE)).unwrap();
    assert_eq!(lines.len(), out.log.len() + 1);
    assert!(matches!(lines[0], LogLine::Header(_)));
    for name in ["report.md", "best_table.csv", "run_config.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let events: Vec<ProgressEvent> = rx.try_iter().collect();
    let proposed = events
        .iter()
        .filter(|e| matches!(e, ProgressEvent::PlanProposed { .. }))
        .count();
    assert_eq!(proposed, out.log.len());
    assert!(matches!(events.last(), Some(ProgressEvent::Stopped { .. })));
}

#[test]
fn torn_final_line_keeps_earlier_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = Runner::new(config()).with_out_dir(dir.path()).run(&input()).unwrap();
    assert!(out.log.len() >= 2);
    let path = dir.path().join(EXPERIENCE_FILE);
    let text = std::fs::read_to_string(&path).unwrap();
    let keep: Vec<&str> = text.lines().take(3).collect();
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "{}", keep.join("\n")).unwrap();
    write!(f, "{{\"record\":\"iteration\",\"iterat").unwrap();
    drop(f);
    let lines = read_log(&path).unwrap();
    assert_eq!(lines.len(), 3);
    match &lines[2] {
        LogLine::Iteration(r) => assert_eq!(r.iteration, 2),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn identical_runs_match_after_masking() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let out = Runner::new(config()).with_out_dir(dir.path()).run(&input()).unwrap();
        let log = std::fs::read_to_string(dir.path().join(EXPERIENCE_FILE)).unwrap();
        let log: Vec<String> = log.lines().map(mask_volatile_json).collect();
        (log, mask_volatile_report(&out.report))
    };
    let (a, b) = (run(), run());
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
    assert!(a.0[0].contains("<masked>"));
}

#[test]
fn zero_accepted_actions_report_only_cleaning() {
    let c = RunConfig {
        min_improvement: 1e9,
        ..config()
    };
    let square = plan(vec![Action::unary(UnaryOp::Square, "x3", "x3_sq")]);
    let out = Runner::new(c).with_planner(scripted(vec![square])).run(&input()).unwrap();
    assert!(!out.log[0].accepted);
    assert!(out.report.contains("Accepted feature actions:\n\n- None."));
    let b = format!("{:.3}", out.summary.baseline_metric);
    assert!(out.report.contains(&format!("metric: {b} → {b}")));
}

#[test]
fn best_table_re_evaluates_to_the_reported_best() {
    use forge_core::eval::{evaluate, LearnerRegistry, LearnerSpec};
    let out = Runner::new(config()).run(&input()).unwrap();
    let task = out.header.routing.task;
    let learner = LearnerRegistry::default()
        .build(&LearnerSpec::default_for(task))
        .unwrap();
    let again = evaluate(&out.best_table, task, learner.as_ref(), 5, 7).unwrap();
    assert!((again.primary_metric.value - out.summary.best_metric).abs() < 1e-9);
    assert!(out.summary.best_metric >= out.summary.baseline_metric);
}
