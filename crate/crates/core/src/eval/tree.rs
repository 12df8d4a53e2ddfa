//! CART decision tree for classification (Gini) and regression (squared error).
//!
//! Feature orderings are sorted once per fit and partitioned stably at each
//! split. Between equally good splits the earlier feature wins, so a
//! duplicated column never changes the fitted tree.

use std::collections::BTreeMap;

use super::encode::Matrix;
use super::learner::{FitTarget, Learner, Model, Prediction};
use crate::error::{Error, Result};
use crate::routing::TaskKind;

#[derive(Debug, Clone)]
pub struct CartTree {
    pub max_depth: usize,
    pub min_leaf: usize,
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        value: f64,
        positive: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug)]
struct Fitted {
    nodes: Vec<Node>,
    binary: bool,
    /// Regression targets are fitted divided by this factor.
    scale: f64,
}

enum Y<'a> {
    Classes(&'a [usize], usize),
    Values(Vec<f64>),
}

struct Builder<'a> {
    x: &'a Matrix,
    y: Y<'a>,
    max_depth: usize,
    min_leaf: usize,
    nodes: Vec<Node>,
    in_left: Vec<bool>,
}

impl Learner for CartTree {
    fn name(&self) -> &'static str {
        "cart_tree"
    }

    fn supports(&self, task: TaskKind) -> bool {
        task != TaskKind::Unsupervised
    }

    fn hyperparameters(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("max_depth".into(), self.max_depth as f64),
            ("min_leaf".into(), self.min_leaf as f64),
        ])
    }

    fn fit(&self, x: &Matrix, target: FitTarget<'_>, _seed: u64) -> Result<Box<dyn Model>> {
        if x.n_rows == 0 {
            return Err(Error::Evaluation("cannot fit a tree on zero rows".into()));
        }
        let (y, binary, scale) = match target {
            FitTarget::Classes { y, n_classes } => (Y::Classes(y, n_classes), n_classes == 2, 1.0),
            FitTarget::Values(v) => {
                let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let scale = if m > 0.0 && m.is_finite() { m } else { 1.0 };
                (Y::Values(v.iter().map(|x| x / scale).collect()), false, scale)
            }
            FitTarget::Unlabeled => {
                return Err(Error::Evaluation("a tree needs labels".into()));
            }
        };
        let mut b = Builder {
            x,
            y,
            max_depth: self.max_depth,
            min_leaf: self.min_leaf.max(1),
            nodes: Vec::new(),
            in_left: vec![false; x.n_rows],
        };
        let orders: Vec<Vec<u32>> = (0..x.n_cols)
            .map(|f| {
                let mut idx: Vec<u32> = (0..x.n_rows as u32).collect();
                idx.sort_by(|&a, &c| x.get(a as usize, f).total_cmp(&x.get(c as usize, f)));
                idx
            })
            .collect();
        let all: Vec<u32> = (0..x.n_rows as u32).collect();
        b.build(all, orders, 0);
        Ok(Box::new(Fitted {
            nodes: b.nodes,
            binary,
            scale,
        }))
    }
}

impl Builder<'_> {
    /// Appends the subtree for `rows` and returns its node index.
    fn build(&mut self, rows: Vec<u32>, orders: Vec<Vec<u32>>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(self.leaf(&rows));
        if depth >= self.max_depth || rows.len() < 2 * self.min_leaf || self.pure(&rows) {
            return id;
        }
        let Some((feature, pos, threshold)) = self.best_split(&orders) else {
            return id;
        };
        for &r in &orders[feature][..=pos] {
            self.in_left[r as usize] = true;
        }
        let mut left_orders = Vec::with_capacity(orders.len());
        let mut right_orders = Vec::with_capacity(orders.len());
        for o in orders {
            let (l, r): (Vec<u32>, Vec<u32>) = o.into_iter().partition(|&i| self.in_left[i as usize]);
            left_orders.push(l);
            right_orders.push(r);
        }
        let (left_rows, right_rows): (Vec<u32>, Vec<u32>) =
            rows.into_iter().partition(|&i| self.in_left[i as usize]);
        for &r in &left_rows {
            self.in_left[r as usize] = false;
        }
        let left = self.build(left_rows, left_orders, depth + 1);
        let right = self.build(right_rows, right_orders, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    fn leaf(&self, rows: &[u32]) -> Node {
        match &self.y {
            Y::Classes(y, k) => {
                let mut counts = vec![0usize; *k];
                for &r in rows {
                    counts[y[r as usize]] += 1;
                }
                let best = counts.iter().copied().max().unwrap_or(0);
                let value = counts.iter().position(|&c| c == best).unwrap_or(0);
                let positive = if *k == 2 && !rows.is_empty() {
                    counts[1] as f64 / rows.len() as f64
                } else {
                    0.0
                };
                Node::Leaf {
                    value: value as f64,
                    positive,
                }
            }
            Y::Values(v) => {
                let mean = rows.iter().map(|&r| v[r as usize]).sum::<f64>() / rows.len() as f64;
                Node::Leaf {
                    value: mean,
                    positive: 0.0,
                }
            }
        }
    }

    fn pure(&self, rows: &[u32]) -> bool {
        match &self.y {
            Y::Classes(y, _) => rows.iter().all(|&r| y[r as usize] == y[rows[0] as usize]),
            Y::Values(v) => rows.iter().all(|&r| v[r as usize] == v[rows[0] as usize]),
        }
    }

    /// Best `(feature, last left position in that feature's order, threshold)`.
    fn best_split(&self, orders: &[Vec<u32>]) -> Option<(usize, usize, f64)> {
        let n = orders[0].len();
        let min_leaf = self.min_leaf;
        let mut best: Option<(usize, usize, f64)> = None;
        // lower is better for both criteria
        let mut best_score = self.parent_score(&orders[0]) - 1e-12 * n as f64;
        for (f, order) in orders.iter().enumerate() {
            let value = |i: usize| self.x.get(order[i] as usize, f);
            match &self.y {
                Y::Classes(y, k) => {
                    let mut left = vec![0usize; *k];
                    let mut right = vec![0usize; *k];
                    for &r in order {
                        right[y[r as usize]] += 1;
                    }
                    let mut sq_l = 0.0f64;
                    let mut sq_r: f64 = right.iter().map(|&c| (c * c) as f64).sum();
                    for i in 0..n - 1 {
                        let c = y[order[i] as usize];
                        sq_l += (2 * left[c] + 1) as f64;
                        sq_r -= (2 * right[c] - 1) as f64;
                        left[c] += 1;
                        right[c] -= 1;
                        let (nl, nr) = (i + 1, n - i - 1);
                        if nl < min_leaf || nr < min_leaf || value(i) >= value(i + 1) {
                            continue;
                        }
                        // weighted Gini: n_l - sum c_l^2 / n_l + n_r - sum c_r^2 / n_r
                        let score = n as f64 - sq_l / nl as f64 - sq_r / nr as f64;
                        if score < best_score {
                            best_score = score;
                            best = Some((f, i, midpoint(value(i), value(i + 1))));
                        }
                    }
                }
                Y::Values(v) => {
                    let total: f64 = order.iter().map(|&r| v[r as usize]).sum();
                    let mut sl = 0.0;
                    for i in 0..n - 1 {
                        sl += v[order[i] as usize];
                        let (nl, nr) = (i + 1, n - i - 1);
                        if nl < min_leaf || nr < min_leaf || value(i) >= value(i + 1) {
                            continue;
                        }
                        let sr = total - sl;
                        // SSE minus the constant sum of squares
                        let score = -(sl * sl / nl as f64 + sr * sr / nr as f64);
                        if score < best_score {
                            best_score = score;
                            best = Some((f, i, midpoint(value(i), value(i + 1))));
                        }
                    }
                }
            }
        }
        best
    }

    fn parent_score(&self, rows: &[u32]) -> f64 {
        let n = rows.len() as f64;
        match &self.y {
            Y::Classes(y, k) => {
                let mut counts = vec![0usize; *k];
                for &r in rows {
                    counts[y[r as usize]] += 1;
                }
                n - counts.iter().map(|&c| (c * c) as f64).sum::<f64>() / n
            }
            Y::Values(v) => {
                let s: f64 = rows.iter().map(|&r| v[r as usize]).sum();
                -(s * s / n)
            }
        }
    }
}

/// A threshold strictly below `b` and at least `a`.
fn midpoint(a: f64, b: f64) -> f64 {
    let m = a / 2.0 + b / 2.0;
    if m >= a && m < b {
        m
    } else {
        a
    }
}

impl Model for Fitted {
    fn predict(&self, x: &Matrix) -> Prediction {
        let mut values = Vec::with_capacity(x.n_rows);
        let mut scores = Vec::with_capacity(x.n_rows);
        for r in 0..x.n_rows {
            let row = x.row(r);
            let mut id = 0;
            loop {
                match &self.nodes[id] {
                    Node::Leaf { value, positive } => {
                        values.push(value * self.scale);
                        scores.push(*positive);
                        break;
                    }
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    } => id = if row[*feature] <= *threshold { *left } else { *right },
                }
            }
        }
        Prediction {
            values,
            positive_score: self.binary.then_some(scores),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree() -> CartTree {
        CartTree {
            max_depth: 6,
            min_leaf: 5,
        }
    }

    #[test]
    fn separable_classes_fit_exactly() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i * 7 % 5) as f64]).collect();
        let y: Vec<usize> = (0..40).map(|i| (i >= 20) as usize).collect();
        let x = Matrix::from_rows(&rows);
        let m = tree()
            .fit(&x, FitTarget::Classes { y: &y, n_classes: 2 }, 0)
            .unwrap();
        let p = m.predict(&x);
        let pred: Vec<usize> = p.values.iter().map(|&v| v as usize).collect();
        assert_eq!(pred, y);
        assert!(p.positive_score.is_some());
    }

    #[test]
    fn regression_identity() {
        let rows: Vec<Vec<f64>> = (0..64).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..64).map(|i| i as f64).collect();
        let x = Matrix::from_rows(&rows);
        let m = tree().fit(&x, FitTarget::Values(&y), 0).unwrap();
        let p = m.predict(&x).values;
        let err: f64 = p.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum::<f64>() / 64.0;
        assert!(err < 2.5, "{err}");
    }

    #[test]
    fn duplicate_column_changes_nothing() {
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|i| vec![((i * 13) % 17) as f64, ((i * 5) % 11) as f64])
            .collect();
        let y: Vec<usize> = (0..50).map(|i| ((i * 13) % 17 > 8) as usize).collect();
        let dup: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0], r[1], r[0]]).collect();
        let t = FitTarget::Classes { y: &y, n_classes: 2 };
        let a = tree().fit(&Matrix::from_rows(&rows), t, 0).unwrap();
        let b = tree().fit(&Matrix::from_rows(&dup), t, 0).unwrap();
        assert_eq!(
            a.predict(&Matrix::from_rows(&rows)).values,
            b.predict(&Matrix::from_rows(&dup)).values
        );
    }
}
