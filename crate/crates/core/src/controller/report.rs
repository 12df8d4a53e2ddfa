//! Markdown run report.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::log::{ExperienceRecord, RunHeader};
use super::StopReason;
use crate::actions::{action_signature, describe_action};
use crate::eval::MetricKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub features_before: usize,
    pub features_after: usize,
    pub baseline_metric: f64,
    pub best_metric: f64,
    pub metric: MetricKind,
    pub stop_reason: StopReason,
    pub actions_used: usize,
    pub iterations: usize,
    /// Wall-clock seconds; masked when comparing reports.
    pub elapsed: f64,
}

pub const SECTION_HEADINGS: [&str; 4] = [
    "## Cleaning and feature operations",
    "## Routing decisions",
    "## Validation checks",
    "## Performance progression",
];

const GENERATED_PREFIX: &str = "Generated: ";
const ELAPSED_PREFIX: &str = "Elapsed: ";

/// `features: A → B, metric: X → Y, stop: R`
pub fn summary_line(s: &RunSummary) -> String {
    format!(
        "features: {} → {}, metric: {:.3} → {:.3}, stop: {}",
        s.features_before, s.features_after, s.baseline_metric, s.best_metric, s.stop_reason
    )
}

fn cell(text: &str) -> String {
    text.replace('|', "\\|")
}

fn decision(rec: &ExperienceRecord) -> &'static str {
    match (&rec.plan, &rec.grounding) {
        (None, _) => "no plan",
        (Some(_), Some(g)) if !g.plan_admissible => "inadmissible",
        _ if rec.accepted => "accepted",
        _ if rec.metric_after.is_none() => "failed",
        _ => "rejected",
    }
}

/// Renders the report. Output depends only on the arguments.
pub fn render_report(header: &RunHeader, log: &[ExperienceRecord], summary: &RunSummary) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "# Feature engineering run report\n");
    let _ = writeln!(w, "{GENERATED_PREFIX}{}\n", header.timestamp);

    let _ = writeln!(w, "{}\n", SECTION_HEADINGS[0]);
    let c = &header.cleaning;
    let _ = writeln!(
        w,
        "Input: {} rows, {} columns. Cleaning mode: {}.\n",
        header.input_rows, header.input_columns, c.mode
    );
    if c.steps.is_empty() {
        let _ = writeln!(w, "- No cleaning step changed the table.");
    }
    for step in &c.steps {
        let _ = writeln!(
            w,
            "- {}: {} column(s), {} cell(s) changed.",
            step.name,
            step.columns.len(),
            step.cells_changed
        );
    }
    if !c.columns_dropped.is_empty() {
        let _ = writeln!(w, "- Dropped columns: {}.", c.columns_dropped.join(", "));
    }
    if c.rows_dropped > 0 {
        let _ = writeln!(w, "- Dropped rows: {}.", c.rows_dropped);
    }
    let _ = writeln!(w, "\nAccepted feature actions:\n");
    let accepted: Vec<&ExperienceRecord> = log.iter().filter(|r| r.accepted).collect();
    if accepted.is_empty() {
        let _ = writeln!(w, "- None.");
    }
    for rec in accepted {
        for action in rec.plan.iter().flat_map(|p| p.actions()) {
            let _ = writeln!(w, "- Iteration {}: {}", rec.iteration, describe_action(action));
        }
    }

    let _ = writeln!(w, "\n{}\n", SECTION_HEADINGS[1]);
    let r = &header.routing;
    let _ = writeln!(w, "- Task: {} (rule {:?}). {}", r.task, r.rule_fired, r.rationale);
    let b = &header.baseline;
    let _ = writeln!(
        w,
        "- Model: {}; primary metric {} over {} fold(s), seed {}.",
        b.model, b.primary_metric.kind, b.n_folds, b.seed
    );
    let _ = writeln!(w, "- Action planner: {}.", header.config.planner.name());
    let mut origins: BTreeMap<String, usize> = BTreeMap::new();
    for p in log.iter().filter_map(|r| r.plan.as_ref()) {
        *origins.entry(p.origin.to_string()).or_default() += 1;
    }
    if !origins.is_empty() {
        let tally: Vec<String> = origins.iter().map(|(o, n)| format!("{o} {n}")).collect();
        let _ = writeln!(w, "- Plans by origin: {}.", tally.join(", "));
    }
    let planner = header.config.planner.name();
    for rec in log {
        if let Some(p) = rec.plan.as_ref().filter(|p| p.origin.to_string() != planner) {
            let _ = writeln!(
                w,
                "- Iteration {}: plan came from the {} planner ({}).",
                rec.iteration, p.origin, rec.note
            );
        }
    }

    let _ = writeln!(w, "\n{}\n", SECTION_HEADINGS[2]);
    let (mut checked, mut failed) = (0, 0);
    if log.is_empty() {
        let _ = writeln!(w, "- No plan was checked.");
    }
    for rec in log {
        let Some(g) = &rec.grounding else {
            let _ = writeln!(w, "- Iteration {}: no plan to check ({}).", rec.iteration, rec.note);
            continue;
        };
        checked += 1;
        if g.plan_admissible {
            let _ = writeln!(
                w,
                "- Iteration {}: all {} action(s) passed grounding.",
                rec.iteration,
                g.verdicts.len()
            );
        } else {
            failed += 1;
            for (i, code, msg) in g.failures() {
                let _ = writeln!(
                    w,
                    "- Iteration {}: {:?} failed on action {}: {}.",
                    rec.iteration,
                    code,
                    i + 1,
                    msg
                );
            }
            let _ = writeln!(
                w,
                "  The plan was rejected before execution and the planner was asked again."
            );
        }
    }
    let _ = writeln!(
        w,
        "\n{checked} plan(s) checked, {} passed, {failed} rejected.",
        checked - failed
    );

    let _ = writeln!(w, "\n{}\n", SECTION_HEADINGS[3]);
    let _ = writeln!(
        w,
        "Baseline {}: {:.4}\n",
        summary.metric, summary.baseline_metric
    );
    let _ = writeln!(
        w,
        "| Iteration | Origin | Plan | Grounding | Before | After | Delta | Decision |"
    );
    let _ = writeln!(w, "|---|---|---|---|---|---|---|---|");
    for rec in log {
        let origin = rec
            .planner_origin
            .map_or_else(|| "-".to_owned(), |o| o.to_string());
        let plan = rec.plan.as_ref().map_or_else(
            || "-".to_owned(),
            |p| p.actions().iter().map(action_signature).collect::<Vec<_>>().join("; "),
        );
        let grounding = match &rec.grounding {
            None => "-".to_owned(),
            Some(g) if g.plan_admissible => "pass".to_owned(),
            Some(g) => g
                .failures()
                .map(|(_, code, _)| format!("{code:?}"))
                .collect::<Vec<_>>()
                .join(","),
        };
        let (after, delta) = match rec.metric_after {
            Some(a) => (format!("{a:.4}"), format!("{:+.4}", a - rec.metric_before)),
            None => ("-".into(), "-".into()),
        };
        let _ = writeln!(
            w,
            "| {} | {} | {} | {} | {:.4} | {} | {} | {} |",
            rec.iteration,
            origin,
            cell(&plan),
            grounding,
            rec.metric_before,
            after,
            delta,
            decision(rec)
        );
    }

    let _ = writeln!(w, "\n## Summary\n");
    let _ = writeln!(
        w,
        "Stopped after {} iteration(s) with {} action(s) applied.",
        summary.iterations, summary.actions_used
    );
    let _ = writeln!(w, "{ELAPSED_PREFIX}{:.3} s\n", summary.elapsed);
    let _ = writeln!(w, "{}", summary_line(summary));
    out
}

/// Blanks the generation time and elapsed-time lines.
pub fn mask_volatile_report(report: &str) -> String {
    report
        .lines()
        .map(|l| {
            if let Some(p) = [GENERATED_PREFIX, ELAPSED_PREFIX]
                .into_iter()
                .find(|p| l.starts_with(p))
            {
                format!("{p}<masked>")
            } else {
                l.to_owned()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}
