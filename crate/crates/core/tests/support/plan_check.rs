//! Grounding and execution checks over random plans. Expects `gen` to be
//! declared at the crate root of the test target.

#![allow(dead_code)]

use std::panic::{catch_unwind, AssertUnwindSafe};

use forge_core::actions::{execute_plan, ground_plan, Plan, Verdict};
use forge_core::table::{ColumnData, Schema, Table};
use forge_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gen::{random_plan, random_table};

#[derive(Debug, Default, Clone, Copy)]
pub struct FuzzStats {
    pub admissible: usize,
    pub inadmissible: usize,
}

fn all_finite(t: &Table) -> bool {
    t.columns().all(|c| match c.data() {
        ColumnData::Numeric(v) => v.iter().flatten().all(|x| x.is_finite()),
        _ => true,
    })
}

/// Grounds and, when admissible, executes one plan. Returns whether it was
/// admissible, or a description of the broken property.
pub fn check_plan(plan: &Plan, table: &Table) -> Result<bool, String> {
    let report = ground_plan(plan, &Schema::of(table));
    let all_pass = report.verdicts.iter().all(Verdict::is_pass);
    if report.plan_admissible != all_pass || report.verdicts.len() != plan.len() {
        return Err(format!("verdicts disagree with the admissible flag for {plan:?}"));
    }
    let before = table.clone();
    let run = catch_unwind(AssertUnwindSafe(|| execute_plan(plan, table)))
        .map_err(|_| format!("execution panicked for {plan:?}"))?;
    if !table.same_values(&before) {
        return Err("execution modified its input".into());
    }
    if !report.plan_admissible {
        if report.failures().next().is_none() {
            return Err(format!("inadmissible plan without a failure code: {plan:?}"));
        }
        return match run {
            Err(Error::Contract(_)) => Ok(false),
            other => Err(format!("inadmissible plan was not refused: {other:?}")),
        };
    }
    let out = run.map_err(|e| format!("admissible plan failed: {e} for {plan:?}"))?;
    if !all_finite(&out) {
        return Err(format!("non-finite value after {plan:?}"));
    }
    if out.schema_signature() != report.predicted {
        return Err(format!(
            "predicted schema {:?} but executed {:?} for {plan:?}",
            report.predicted,
            out.schema_signature()
        ));
    }
    Ok(true)
}

/// `plans_per_table` random plans against each of `n_tables` random tables.
pub fn fuzz(seed: u64, n_tables: usize, plans_per_table: usize) -> Result<FuzzStats, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = FuzzStats::default();
    for _ in 0..n_tables {
        let table = random_table(&mut rng);
        for _ in 0..plans_per_table {
            let plan = random_plan(&mut rng, &table);
            if check_plan(&plan, &table)? {
                stats.admissible += 1;
            } else {
                stats.inadmissible += 1;
            }
        }
    }
    Ok(stats)
}

/// Draws plans until `wanted` admissible ones have had their predicted
/// schema compared with the executed one.
pub fn admissible_schemas(seed: u64, wanted: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut draws = 0;
    while checked < wanted {
        draws += 1;
        if draws > wanted * 200 {
            return Err(format!("only {checked} admissible plans in {draws} draws"));
        }
        let table = random_table(&mut rng);
        let plan = random_plan(&mut rng, &table);
        if check_plan(&plan, &table)? {
            checked += 1;
        }
    }
    Ok(checked)
}
