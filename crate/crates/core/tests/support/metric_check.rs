//! Random metric instances compared against the brute-force references.
//! Expects `oracles` to be declared at the crate root of the test target.

#![allow(dead_code)]

use forge_core::eval::{auc_binary, f1_macro, mae, one_minus_rae, rmse, silhouette};
use rand::Rng;

use crate::oracles;

pub const TOLERANCE: f64 = 1e-9;

fn close(name: &str, got: f64, want: f64) -> Result<(), String> {
    if (got - want).abs() <= TOLERANCE {
        Ok(())
    } else {
        Err(format!("{name}: library {got} vs reference {want}"))
    }
}

fn reals(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect()
}

/// Draws one instance of every metric with at most 50 points and checks
/// the library against the references.
pub fn check_instance(rng: &mut impl Rng) -> Result<(), String> {
    let n = rng.gen_range(2..=50);

    let k = rng.gen_range(2..=4);
    let y: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let p: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    close("f1_macro", f1_macro(&y, &p).map_err(|e| e.to_string())?, oracles::f1_macro(&y, &p))?;

    let mut yb: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    yb[0] = true;
    yb[1] = false;
    // coarse scores so ties occur
    let s: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64 / 4.0).collect();
    close("auc", auc_binary(&yb, &s).map_err(|e| e.to_string())?, oracles::auc(&yb, &s))?;

    let yt = reals(rng, n);
    let yp = reals(rng, n);
    close("rmse", rmse(&yt, &yp).map_err(|e| e.to_string())?, oracles::rmse(&yt, &yp))?;
    close("mae", mae(&yt, &yp).map_err(|e| e.to_string())?, oracles::mae(&yt, &yp))?;
    close(
        "one_minus_rae",
        one_minus_rae(&yt, &yp).map_err(|e| e.to_string())?,
        oracles::one_minus_rae(&yt, &yp),
    )?;

    let dim = rng.gen_range(1..=3);
    let x: Vec<Vec<f64>> = (0..n).map(|_| reals(rng, dim)).collect();
    let mut labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    labels[0] = 0;
    labels[1] = 1;
    let rows: Vec<&[f64]> = x.iter().map(Vec::as_slice).collect();
    close(
        "silhouette",
        silhouette(&rows, &labels).map_err(|e| e.to_string())?,
        oracles::silhouette(&x, &labels),
    )
}
