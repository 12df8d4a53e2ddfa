//! Writes the synthetic suite as CSV files.
//!
//! `cargo run -p forge-core --example write_synthetic -- <dir> [seed]`

use std::path::PathBuf;

use forge_core::synth::suite;
use forge_core::table::write_csv;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "datasets".into()));
    let seed = args.next().map_or(Ok(7), |s| s.parse())?;
    std::fs::create_dir_all(&dir)?;
    for ds in suite(seed) {
        let path = dir.join(format!("{}.csv", ds.name));
        write_csv(&ds.table, &path)?;
        println!("{} ({} rows, target {})", path.display(), ds.table.n_rows(), ds.target.unwrap_or("none"));
    }
    Ok(())
}
