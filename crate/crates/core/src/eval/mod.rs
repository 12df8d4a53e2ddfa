//! Cross-validated scoring of a table for its routed task.

mod encode;
mod kmeans;
mod learner;
mod linear;
pub mod metrics;
mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::routing::TaskKind;
use crate::table::Table;

pub use encode::{encode_features, Encoded, Labels, Matrix};
pub use kmeans::KMeans;
pub use learner::{
    FitTarget, Learner, LearnerFactory, LearnerRegistry, LearnerSpec, Model, Prediction,
};
pub use linear::{LinearLeastSquares, LogisticRegression};
pub use metrics::{auc_binary, f1_macro, mae, one_minus_rae, rmse, silhouette};
pub use tree::CartTree;

pub const DEFAULT_FOLDS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    F1Macro,
    Auc,
    Rmse,
    Mae,
    OneMinusRae,
    Silhouette,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::F1Macro => "f1_macro",
            MetricKind::Auc => "auc",
            MetricKind::Rmse => "rmse",
            MetricKind::Mae => "mae",
            MetricKind::OneMinusRae => "one_minus_rae",
            MetricKind::Silhouette => "silhouette",
        }
    }

    /// The score the search loop maximizes for `task`.
    pub fn primary_for(task: TaskKind) -> MetricKind {
        match task {
            TaskKind::Classification => MetricKind::F1Macro,
            TaskKind::Regression => MetricKind::OneMinusRae,
            TaskKind::Unsupervised => MetricKind::Silhouette,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub kind: MetricKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub primary_metric: Metric,
    pub secondary_metrics: Vec<Metric>,
    pub model: String,
    pub hyperparameters: BTreeMap<String, f64>,
    pub n_folds: usize,
    pub seed: u64,
    pub wall_time: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Encodes `table` and cross-validates `learner` on it.
pub fn evaluate(
    table: &Table,
    task: TaskKind,
    learner: &dyn Learner,
    n_folds: usize,
    seed: u64,
) -> Result<EvalResult> {
    let enc = encode_features(table, task)?;
    cross_validate(&enc.x, enc.labels.as_ref(), task, learner, n_folds, seed)
}

/// Fold index per row. Classification folds are stratified by label.
/// Returns the assignment, the fold count actually used and an optional note.
pub fn assign_folds(
    n_rows: usize,
    classes: Option<&[usize]>,
    n_folds: usize,
    seed: u64,
) -> Result<(Vec<usize>, usize, Option<String>)> {
    if n_rows < 2 {
        return Err(Error::Evaluation(format!(
            "cross-validation needs at least 2 rows, got {n_rows}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = n_folds.max(2);
    let mut note = None;
    let mut fold_of = vec![0; n_rows];
    match classes {
        Some(y) => {
            let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (r, &c) in y.iter().enumerate() {
                by_class.entry(c).or_default().push(r);
            }
            let smallest = by_class.values().map(Vec::len).min().unwrap_or(0);
            if smallest < folds {
                let reduced = smallest.max(2);
                if reduced != folds {
                    note = Some(format!(
                        "smallest class has {smallest} rows; folds reduced from {folds} to {reduced}"
                    ));
                }
                folds = reduced;
            }
            let mut offset = 0;
            for rows in by_class.values_mut() {
                rows.shuffle(&mut rng);
                for (i, &r) in rows.iter().enumerate() {
                    fold_of[r] = (offset + i) % folds;
                }
                offset += rows.len();
            }
        }
        None => {
            if n_rows < folds {
                note = Some(format!("only {n_rows} rows; folds reduced from {folds} to {n_rows}"));
                folds = n_rows;
            }
            let mut order: Vec<usize> = (0..n_rows).collect();
            order.shuffle(&mut rng);
            for (i, &r) in order.iter().enumerate() {
                fold_of[r] = i % folds;
            }
        }
    }
    Ok((fold_of, folds, note))
}

/// Mean primary and secondary metrics over cross-validation folds. The
/// unsupervised task has no folds: k-means runs on the full matrix and is
/// scored by silhouette.
pub fn cross_validate(
    x: &Matrix,
    labels: Option<&Labels>,
    task: TaskKind,
    learner: &dyn Learner,
    n_folds: usize,
    seed: u64,
) -> Result<EvalResult> {
    let start = Instant::now();
    if !learner.supports(task) {
        return Err(Error::Config(format!(
            "learner {} does not support {task}",
            learner.name()
        )));
    }
    let mut notes = Vec::new();
    let primary_kind = MetricKind::primary_for(task);
    let mut model_name = learner.name().to_owned();

    let (primary, secondary, folds_used) = match (task, labels) {
        (TaskKind::Unsupervised, _) => {
            let model = learner.fit(x, FitTarget::Unlabeled, seed)?;
            if let Some(s) = model.summary() {
                model_name = format!("{model_name} {s}");
            }
            let assign: Vec<usize> = model.predict(x).values.iter().map(|&v| v as usize).collect();
            (silhouette(&x.rows(), &assign)?, Vec::new(), 1)
        }
        (TaskKind::Classification, Some(Labels::Classes { y, classes })) => {
            let (fold_of, folds, note) = assign_folds(x.n_rows, Some(y), n_folds, seed)?;
            notes.extend(note);
            let mut f1s = Vec::new();
            let mut aucs = Vec::new();
            for f in 0..folds {
                let (train, test) = split(&fold_of, f);
                if train.is_empty() || test.is_empty() {
                    continue;
                }
                let y_train: Vec<usize> = train.iter().map(|&r| y[r]).collect();
                let y_test: Vec<usize> = test.iter().map(|&r| y[r]).collect();
                let model = learner.fit(
                    &x.select_rows(&train),
                    FitTarget::Classes {
                        y: &y_train,
                        n_classes: classes.len(),
                    },
                    seed,
                )?;
                let pred = model.predict(&x.select_rows(&test));
                let labels: Vec<usize> = pred.values.iter().map(|&v| v as usize).collect();
                f1s.push(f1_macro(&y_test, &labels)?);
                if let Some(scores) = pred.positive_score.filter(|_| classes.len() == 2) {
                    let pos: Vec<bool> = y_test.iter().map(|&c| c == 1).collect();
                    if let Ok(a) = auc_binary(&pos, &scores) {
                        aucs.push(a);
                    }
                }
            }
            let mut secondary = Vec::new();
            if !aucs.is_empty() {
                secondary.push(Metric {
                    kind: MetricKind::Auc,
                    value: mean(&aucs),
                });
            }
            (mean_or_err(&f1s, "f1_macro")?, secondary, folds)
        }
        (TaskKind::Regression, Some(Labels::Values(y))) => {
            let (fold_of, folds, note) = assign_folds(x.n_rows, None, n_folds, seed)?;
            notes.extend(note);
            let (mut raes, mut rmses, mut maes) = (Vec::new(), Vec::new(), Vec::new());
            let mut skipped = 0;
            for f in 0..folds {
                let (train, test) = split(&fold_of, f);
                if train.is_empty() || test.is_empty() {
                    continue;
                }
                let y_train: Vec<f64> = train.iter().map(|&r| y[r]).collect();
                let y_test: Vec<f64> = test.iter().map(|&r| y[r]).collect();
                let model = learner.fit(&x.select_rows(&train), FitTarget::Values(&y_train), seed)?;
                let pred = model.predict(&x.select_rows(&test)).values;
                match one_minus_rae(&y_test, &pred) {
                    Ok(v) => raes.push(v),
                    Err(_) => skipped += 1,
                }
                rmses.push(rmse(&y_test, &pred)?);
                maes.push(mae(&y_test, &pred)?);
            }
            if skipped > 0 {
                notes.push(format!(
                    "{skipped} fold(s) with a constant target left out of one_minus_rae"
                ));
            }
            let secondary = vec![
                Metric {
                    kind: MetricKind::Rmse,
                    value: mean(&rmses),
                },
                Metric {
                    kind: MetricKind::Mae,
                    value: mean(&maes),
                },
            ];
            (mean_or_err(&raes, "one_minus_rae")?, secondary, folds)
        }
        _ => {
            return Err(Error::Evaluation(format!(
                "labels do not match the {task} task"
            )))
        }
    };

    Ok(EvalResult {
        primary_metric: Metric {
            kind: primary_kind,
            value: primary,
        },
        secondary_metrics: secondary,
        model: model_name,
        hyperparameters: learner.hyperparameters(),
        n_folds: folds_used,
        seed,
        wall_time: start.elapsed().as_secs_f64(),
        notes,
    })
}

fn split(fold_of: &[usize], f: usize) -> (Vec<usize>, Vec<usize>) {
    (0..fold_of.len()).partition(|&r| fold_of[r] != f)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn mean_or_err(v: &[f64], what: &str) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::UndefinedMetric(format!("{what} undefined on every fold")));
    }
    Ok(mean(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Column;

    fn registry_learner(task: TaskKind) -> Box<dyn Learner> {
        LearnerRegistry::default()
            .build(&LearnerSpec::default_for(task))
            .unwrap()
    }

    #[test]
    fn separable_classes_score_one() {
        // a wide gap between the classes, so any threshold in it separates them
        let x = Column::numeric("x", (0..100).map(|i| Some((i + 100 * (i / 50)) as f64)).collect())
            .unwrap();
        let y = Column::numeric("y", (0..100).map(|i| Some((i >= 50) as u8 as f64)).collect())
            .unwrap();
        let t = Table::new(vec![x, y]).unwrap().with_target(Some("y")).unwrap();
        let task = TaskKind::Classification;
        let r = evaluate(&t, task, registry_learner(task).as_ref(), 5, 7).unwrap();
        assert_eq!(r.primary_metric.value, 1.0);
        assert_eq!(r.secondary_metrics[0].kind, MetricKind::Auc);
        assert_eq!(r.n_folds, 5);
    }

    #[test]
    fn identity_regression_near_one() {
        let x = Column::numeric("x", (0..500).map(|i| Some(i as f64 / 10.0)).collect()).unwrap();
        let y = Column::numeric("y", (0..500).map(|i| Some(i as f64 / 10.0)).collect()).unwrap();
        let t = Table::new(vec![x, y]).unwrap().with_target(Some("y")).unwrap();
        let task = TaskKind::Regression;
        let r = evaluate(&t, task, registry_learner(task).as_ref(), 5, 7).unwrap();
        assert!(r.primary_metric.value > 0.95, "{}", r.primary_metric.value);
    }

    #[test]
    fn deterministic() {
        let x = Column::numeric("x", (0..60).map(|i| Some(((i * 37) % 11) as f64)).collect())
            .unwrap();
        let y = Column::numeric("y", (0..60).map(|i| Some((i % 3) as f64)).collect()).unwrap();
        let t = Table::new(vec![x, y]).unwrap().with_target(Some("y")).unwrap();
        let task = TaskKind::Classification;
        let l = registry_learner(task);
        let a = evaluate(&t, task, l.as_ref(), 5, 3).unwrap();
        let b = evaluate(&t, task, l.as_ref(), 5, 3).unwrap();
        assert_eq!(a.primary_metric, b.primary_metric);
    }

    #[test]
    fn small_class_reduces_folds() {
        let y: Vec<usize> = vec![0, 0, 0, 0, 0, 0, 1, 1, 1];
        let (fold_of, folds, note) = assign_folds(9, Some(&y), 5, 1).unwrap();
        assert_eq!(folds, 3);
        assert!(note.is_some());
        assert!(fold_of.iter().all(|&f| f < 3));
    }

    #[test]
    fn wrong_learner_for_task() {
        let l = LearnerRegistry::default().build(&LearnerSpec::named("kmeans")).unwrap();
        let x = Matrix::from_rows(&[vec![1.0], vec![2.0]]);
        let labels = Labels::Values(vec![1.0, 2.0]);
        assert!(cross_validate(&x, Some(&labels), TaskKind::Regression, l.as_ref(), 5, 0).is_err());
    }
}
