//! k-means with k-means++ seeding; k chosen by silhouette over a range.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::encode::Matrix;
use super::learner::{FitTarget, Learner, Model, Prediction};
use super::metrics::silhouette;
use crate::error::{Error, Result};
use crate::routing::TaskKind;

#[derive(Debug, Clone)]
pub struct KMeans {
    pub k_min: usize,
    pub k_max: usize,
    pub iterations: usize,
}

#[derive(Debug)]
struct Centroids {
    centers: Vec<Vec<f64>>,
    silhouette: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(centers: &[Vec<f64>], row: &[f64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centers.iter().enumerate() {
        let d = sq_dist(c, row);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// Lloyd iterations from k-means++ starting centers.
pub(crate) fn lloyd(rows: &[&[f64]], k: usize, iterations: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rows.len();
    let mut centers: Vec<Vec<f64>> = vec![rows[rng.gen_range(0..n)].to_vec()];
    let mut d2: Vec<f64> = rows.iter().map(|r| sq_dist(r, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 && total.is_finite() {
            let mut t = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, d) in d2.iter().enumerate() {
                if t < *d {
                    pick = i;
                    break;
                }
                t -= d;
            }
            pick
        } else {
            rng.gen_range(0..n)
        };
        centers.push(rows[next].to_vec());
        let c = centers.last().expect("just pushed");
        for (d, r) in d2.iter_mut().zip(rows) {
            *d = d.min(sq_dist(r, c));
        }
    }

    let dim = rows[0].len();
    let mut assign: Vec<usize> = rows.iter().map(|r| nearest(&centers, r)).collect();
    for _ in 0..iterations {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (r, &a) in rows.iter().zip(&assign) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(r.iter()) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        let next: Vec<usize> = rows.iter().map(|r| nearest(&centers, r)).collect();
        if next == assign {
            break;
        }
        assign = next;
    }
    assign
}

impl Learner for KMeans {
    fn name(&self) -> &'static str {
        "kmeans"
    }

    fn supports(&self, task: TaskKind) -> bool {
        task == TaskKind::Unsupervised
    }

    fn hyperparameters(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("k_min".into(), self.k_min as f64),
            ("k_max".into(), self.k_max as f64),
            ("iterations".into(), self.iterations as f64),
        ])
    }

    fn fit(&self, x: &Matrix, _target: FitTarget<'_>, seed: u64) -> Result<Box<dyn Model>> {
        let rows = x.rows();
        let n = rows.len();
        let mut best: Option<(usize, Vec<usize>, f64)> = None;
        for k in self.k_min.max(2)..=self.k_max.min(n.saturating_sub(1)) {
            let assign = lloyd(&rows, k, self.iterations, seed.wrapping_add(k as u64));
            let Ok(s) = silhouette(&rows, &assign) else {
                continue;
            };
            if best.as_ref().is_none_or(|b| s > b.2) {
                best = Some((k, assign, s));
            }
        }
        let (k, assign, s) = best.ok_or_else(|| {
            Error::Evaluation("k-means could not form two non-empty clusters".into())
        })?;
        let dim = x.n_cols;
        let mut centers = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (r, &a) in rows.iter().zip(&assign) {
            counts[a] += 1;
            for (c, v) in centers[a].iter_mut().zip(r.iter()) {
                *c += v;
            }
        }
        for (c, n) in centers.iter_mut().zip(&counts) {
            if *n > 0 {
                c.iter_mut().for_each(|v| *v /= *n as f64);
            }
        }
        Ok(Box::new(Centroids {
            centers,
            silhouette: s,
        }))
    }
}

impl Model for Centroids {
    fn predict(&self, x: &Matrix) -> Prediction {
        Prediction {
            values: x
                .rows()
                .iter()
                .map(|r| nearest(&self.centers, r) as f64)
                .collect(),
            positive_score: None,
        }
    }

    fn summary(&self) -> Option<String> {
        Some(format!(
            "k={} (silhouette {:.4} at fit)",
            self.centers.len(),
            self.silhouette
        ))
    }
}
