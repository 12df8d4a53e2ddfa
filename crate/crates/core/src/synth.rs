//! Seeded synthetic datasets with known structure, used by tests, demos and
//! the bundled example CSVs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::table::{Column, ColumnData, Table};

/// A generated table plus the run settings it is meant for.
#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub name: &'static str,
    pub table: Table,
    pub target: Option<&'static str>,
}

pub const SUITE_NAMES: [&str; 4] = [
    "planted_interaction",
    "skewed_classification",
    "redundant_features",
    "two_blobs",
];

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd).expect("positive standard deviation")
}

fn num(name: &str, values: Vec<f64>) -> Column {
    Column::numeric(name, values.into_iter().map(Some).collect()).expect("non-empty name")
}

fn labels(name: &str, values: Vec<bool>) -> Column {
    Column::new(
        name,
        ColumnData::Categorical(
            values
                .into_iter()
                .map(|b| Some(if b { "yes" } else { "no" }.to_owned()))
                .collect(),
        ),
    )
    .expect("non-empty name")
}

fn table(columns: Vec<Column>, target: Option<&str>) -> Table {
    Table::new(columns)
        .and_then(|t| t.with_target(target))
        .expect("generated columns are consistent")
}

/// `y = x1 * x2 + noise` with centred uniform inputs and one unrelated column.
/// Neither input is marginally informative, so the product feature matters.
pub fn planted_interaction(n: usize, seed: u64) -> SyntheticDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = normal(0.1);
    let mut x1 = Vec::with_capacity(n);
    let mut x2 = Vec::with_capacity(n);
    let mut x3 = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let a: f64 = rng.gen_range(-2.0..2.0);
        let b: f64 = rng.gen_range(-2.0..2.0);
        x1.push(a);
        x2.push(b);
        x3.push(rng.gen_range(-2.0..2.0));
        y.push(a * b + eps.sample(&mut rng));
    }
    SyntheticDataset {
        name: "planted_interaction",
        table: table(
            vec![num("x1", x1), num("x2", x2), num("x3", x3), num("y", y)],
            Some("y"),
        ),
        target: Some("y"),
    }
}

/// Binary label driven by the logarithms of two log-normal features.
pub fn skewed_classification(n: usize, seed: u64) -> SyntheticDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = normal(1.0);
    let eps = normal(0.5);
    let mut cols: [Vec<f64>; 3] = Default::default();
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let a = z.sample(&mut rng) * 1.5;
        let b = z.sample(&mut rng) * 1.5;
        cols[0].push(a.exp());
        cols[1].push(b.exp());
        cols[2].push(z.sample(&mut rng));
        y.push(a + 0.5 * b + eps.sample(&mut rng) > 0.0);
    }
    let [s1, s2, g] = cols;
    SyntheticDataset {
        name: "skewed_classification",
        table: table(
            vec![num("s1", s1), num("s2", s2), num("g", g), labels("label", y)],
            Some("label"),
        ),
        target: Some("label"),
    }
}

/// `informative` noisy copies of one latent signal plus as many pure-noise
/// columns; the label is the sign of the latent.
pub fn redundant_features(n: usize, informative: usize, seed: u64) -> SyntheticDataset {
    redundant_features_with(n, informative, 1.5, seed)
}

/// As [`redundant_features`], with the copy noise level as a parameter.
pub fn redundant_features_with(
    n: usize,
    informative: usize,
    copy_sd: f64,
    seed: u64,
) -> SyntheticDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = normal(1.0);
    let copy_noise = normal(copy_sd);
    let mut signal = vec![Vec::with_capacity(n); informative];
    let mut noise = vec![Vec::with_capacity(n); informative];
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let latent = z.sample(&mut rng);
        for c in signal.iter_mut() {
            c.push(latent + copy_noise.sample(&mut rng));
        }
        for c in noise.iter_mut() {
            c.push(z.sample(&mut rng));
        }
        y.push(latent > 0.0);
    }
    let mut columns = Vec::with_capacity(2 * informative + 1);
    for (i, (s, e)) in signal.into_iter().zip(noise).enumerate() {
        columns.push(num(&format!("s{i}"), s));
        columns.push(num(&format!("n{i}"), e));
    }
    columns.push(labels("label", y));
    SyntheticDataset {
        name: "redundant_features",
        table: table(columns, Some("label")),
        target: Some("label"),
    }
}

/// Two well separated Gaussian blobs in the plane, no target.
pub fn two_blobs(n: usize, seed: u64) -> SyntheticDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = normal(1.0);
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        let c = if i % 2 == 0 { 0.0 } else { 6.0 };
        u.push(c + z.sample(&mut rng));
        v.push(c + z.sample(&mut rng));
    }
    SyntheticDataset {
        name: "two_blobs",
        table: table(vec![num("u", u), num("v", v)], None),
        target: None,
    }
}

/// The four datasets at their standard sizes.
pub fn suite(seed: u64) -> Vec<SyntheticDataset> {
    vec![
        planted_interaction(400, seed),
        skewed_classification(300, seed),
        redundant_features(120, 12, seed),
        two_blobs(200, seed),
    ]
}
