//! Runs the heuristic agent over the synthetic suite and prints each summary.
//!
//! `cargo run -p forge-core --example run_suite -- [seed]`

use forge_core::controller::{RunConfig, Runner};
use forge_core::synth::suite;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map_or(Ok(7), |s| s.parse())?;
    for ds in suite(seed) {
        let config = RunConfig {
            seed,
            target: ds.target.map(str::to_owned),
            ..RunConfig::default()
        };
        let start = std::time::Instant::now();
        let out = Runner::new(config).run(&ds.table.with_target(None)?)?;
        println!("{:<22} {}  ({:.2} s)", ds.name, forge_core::controller::summary_line(&out.summary), start.elapsed().as_secs_f64());
        for rec in &out.log {
            let plan = rec.plan.as_ref().map(|p| p.actions().iter().map(forge_core::actions::action_signature).collect::<Vec<_>>().join("; ")).unwrap_or_default();
            println!("    {} {:<60} {:?} {}", rec.iteration, plan, rec.metric_after, rec.accepted);
        }
    }
    Ok(())
}
