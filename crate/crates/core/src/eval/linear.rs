//! Linear models on standardized features.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;

use super::encode::Matrix;
use super::learner::{FitTarget, Learner, Model, Prediction};
use crate::error::{Error, Result};
use crate::routing::TaskKind;

/// Per-column mean and scale. Zero-variance columns get scale 0 and are
/// mapped to 0, which removes them from the model.
#[derive(Debug, Clone)]
struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    fn fit(x: &Matrix) -> Self {
        let n = x.n_rows as f64;
        let mut mean = vec![0.0; x.n_cols];
        let mut scale = vec![0.0; x.n_cols];
        for c in 0..x.n_cols {
            let col = x.column(c);
            let m = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
            mean[c] = m;
            scale[c] = if var > 0.0 && var.is_finite() { var.sqrt() } else { 0.0 };
        }
        Standardizer { mean, scale }
    }

    fn row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s } else { 0.0 })
            .collect()
    }
}

/// Ordinary least squares with an intercept (a 1e-8 ridge keeps the normal
/// equations solvable when columns are collinear).
#[derive(Debug, Clone)]
pub struct LinearLeastSquares;

#[derive(Debug)]
struct LinearModel {
    std: Standardizer,
    intercept: f64,
    weights: Vec<f64>,
}

impl Learner for LinearLeastSquares {
    fn name(&self) -> &'static str {
        "linear_least_squares"
    }

    fn supports(&self, task: TaskKind) -> bool {
        task == TaskKind::Regression
    }

    fn hyperparameters(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("ridge".into(), 1e-8)])
    }

    fn fit(&self, x: &Matrix, target: FitTarget<'_>, _seed: u64) -> Result<Box<dyn Model>> {
        let FitTarget::Values(y) = target else {
            return Err(Error::Evaluation("least squares needs numeric targets".into()));
        };
        if x.n_rows == 0 {
            return Err(Error::Evaluation("cannot fit on zero rows".into()));
        }
        let std = Standardizer::fit(x);
        let p = x.n_cols;
        let n = x.n_rows as f64;
        let y_mean = y.iter().sum::<f64>() / n;
        let mut a = vec![vec![0.0; p]; p];
        let mut b = vec![0.0; p];
        for r in 0..x.n_rows {
            let z = std.row(x.row(r));
            let dy = y[r] - y_mean;
            for i in 0..p {
                b[i] += z[i] * dy;
                for j in 0..p {
                    a[i][j] += z[i] * z[j];
                }
            }
        }
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += 1e-8 * n;
        }
        let weights = solve(a, b);
        Ok(Box::new(LinearModel {
            std,
            intercept: y_mean,
            weights,
        }))
    }
}

impl Model for LinearModel {
    fn predict(&self, x: &Matrix) -> Prediction {
        let values = (0..x.n_rows)
            .map(|r| {
                let z = self.std.row(x.row(r));
                self.intercept + z.iter().zip(&self.weights).map(|(a, w)| a * w).sum::<f64>()
            })
            .collect();
        Prediction {
            values,
            positive_score: None,
        }
    }
}

/// Gaussian elimination with partial pivoting; near-singular pivots give 0.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let p = b.len();
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        a.swap(col, pivot);
        b.swap(col, pivot);
        let d = a[col][col];
        if d.abs() < 1e-12 {
            continue;
        }
        for r in col + 1..p {
            let f = a[r][col] / d;
            if f != 0.0 {
                for c in col..p {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut w = vec![0.0; p];
    for i in (0..p).rev() {
        let d = a[i][i];
        if d.abs() < 1e-12 {
            continue;
        }
        let s: f64 = (i + 1..p).map(|j| a[i][j] * w[j]).sum();
        w[i] = (b[i] - s) / d;
    }
    w
}

/// L2-regularized logistic regression fitted by full-batch gradient descent;
/// one-vs-rest for more than two classes.
#[derive(Debug, Clone)]
pub struct LogisticRegression {
    pub l2: f64,
    pub iterations: usize,
}

#[derive(Debug)]
struct LogisticModel {
    std: Standardizer,
    /// One `(intercept, weights)` per class, or a single one for class 1 when binary.
    heads: Vec<(f64, Vec<f64>)>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LogisticRegression {
    fn fit_head(&self, z: &[Vec<f64>], y: &[f64]) -> (f64, Vec<f64>) {
        let p = z.first().map_or(0, Vec::len);
        let n = z.len() as f64;
        // step below 1/L for the standardized problem
        let lr = 1.0 / (0.25 * (p as f64 + 1.0) + self.l2);
        let mut w = vec![0.0; p];
        let mut b = 0.0;
        let mut grad = vec![0.0; p];
        for _ in 0..self.iterations {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut gb = 0.0;
            for (row, &t) in z.iter().zip(y) {
                let s = b + row.iter().zip(&w).map(|(a, w)| a * w).sum::<f64>();
                let e = sigmoid(s) - t;
                gb += e;
                for (g, a) in grad.iter_mut().zip(row) {
                    *g += e * a;
                }
            }
            b -= lr * gb / n;
            for (wi, g) in w.iter_mut().zip(&grad) {
                *wi -= lr * (g / n + self.l2 * *wi);
            }
        }
        (b, w)
    }
}

impl Learner for LogisticRegression {
    fn name(&self) -> &'static str {
        "logistic_regression"
    }

    fn supports(&self, task: TaskKind) -> bool {
        task == TaskKind::Classification
    }

    fn hyperparameters(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("l2".into(), self.l2),
            ("iterations".into(), self.iterations as f64),
        ])
    }

    fn fit(&self, x: &Matrix, target: FitTarget<'_>, _seed: u64) -> Result<Box<dyn Model>> {
        let FitTarget::Classes { y, n_classes } = target else {
            return Err(Error::Evaluation("logistic regression needs class labels".into()));
        };
        if x.n_rows == 0 {
            return Err(Error::Evaluation("cannot fit on zero rows".into()));
        }
        let std = Standardizer::fit(x);
        let z: Vec<Vec<f64>> = (0..x.n_rows).map(|r| std.row(x.row(r))).collect();
        let classes: Vec<usize> = if n_classes <= 2 { vec![1] } else { (0..n_classes).collect() };
        let heads = classes
            .iter()
            .map(|&c| {
                let t: Vec<f64> = y.iter().map(|&v| (v == c) as u8 as f64).collect();
                self.fit_head(&z, &t)
            })
            .collect();
        Ok(Box::new(LogisticModel { std, heads }))
    }
}

impl Model for LogisticModel {
    fn predict(&self, x: &Matrix) -> Prediction {
        let mut values = Vec::with_capacity(x.n_rows);
        let mut scores = Vec::with_capacity(x.n_rows);
        for r in 0..x.n_rows {
            let z = self.std.row(x.row(r));
            let probs: Vec<f64> = self
                .heads
                .iter()
                .map(|(b, w)| sigmoid(b + z.iter().zip(w).map(|(a, w)| a * w).sum::<f64>()))
                .collect();
            if self.heads.len() == 1 {
                values.push((probs[0] >= 0.5) as u8 as f64);
                scores.push(probs[0]);
            } else {
                let best = probs
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
                values.push(best.0 as f64);
            }
        }
        Prediction {
            positive_score: (self.heads.len() == 1).then_some(scores),
            values,
        }
    }
}
