use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::encode::Matrix;
use super::kmeans::KMeans;
use super::linear::{LinearLeastSquares, LogisticRegression};
use super::tree::CartTree;
use crate::error::{Error, Result};
use crate::routing::TaskKind;

/// What a learner is fitted against.
#[derive(Debug, Clone, Copy)]
pub enum FitTarget<'a> {
    Classes { y: &'a [usize], n_classes: usize },
    Values(&'a [f64]),
    Unlabeled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// Class index, regression value or cluster index per row.
    pub values: Vec<f64>,
    /// Score for class 1 in binary classification, when the model has one.
    pub positive_score: Option<Vec<f64>>,
}

pub trait Model: Send {
    fn predict(&self, x: &Matrix) -> Prediction;

    /// Short description of the fitted model, e.g. the chosen k.
    fn summary(&self) -> Option<String> {
        None
    }
}

pub trait Learner: Send + Sync {
    fn name(&self) -> &'static str;

    fn supports(&self, task: TaskKind) -> bool;

    fn hyperparameters(&self) -> BTreeMap<String, f64>;

    fn fit(&self, x: &Matrix, target: FitTarget<'_>, seed: u64) -> Result<Box<dyn Model>>;
}

/// Learner choice plus its fixed hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub kind: String,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub l2: f64,
    pub iterations: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub kmeans_iterations: usize,
}

impl LearnerSpec {
    pub fn named(kind: &str) -> Self {
        LearnerSpec {
            kind: kind.to_owned(),
            max_depth: 6,
            min_leaf: 5,
            l2: 1e-3,
            iterations: 200,
            k_min: 2,
            k_max: 8,
            kmeans_iterations: 50,
        }
    }

    /// The tree for supervised tasks, k-means otherwise.
    pub fn default_for(task: TaskKind) -> Self {
        match task {
            TaskKind::Unsupervised => LearnerSpec::named("kmeans"),
            _ => LearnerSpec::named("cart_tree"),
        }
    }
}

pub type LearnerFactory = fn(&LearnerSpec) -> Box<dyn Learner>;

/// Name-keyed learner constructors.
pub struct LearnerRegistry {
    factories: BTreeMap<&'static str, LearnerFactory>,
}

impl Default for LearnerRegistry {
    fn default() -> Self {
        let mut r = LearnerRegistry {
            factories: BTreeMap::new(),
        };
        r.register("cart_tree", |s| {
            Box::new(CartTree {
                max_depth: s.max_depth,
                min_leaf: s.min_leaf,
            })
        });
        r.register("linear_least_squares", |_| Box::new(LinearLeastSquares));
        r.register("logistic_regression", |s| {
            Box::new(LogisticRegression {
                l2: s.l2,
                iterations: s.iterations,
            })
        });
        r.register("kmeans", |s| {
            Box::new(KMeans {
                k_min: s.k_min,
                k_max: s.k_max,
                iterations: s.kmeans_iterations,
            })
        });
        r
    }
}

impl LearnerRegistry {
    pub fn register(&mut self, name: &'static str, factory: LearnerFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn build(&self, spec: &LearnerSpec) -> Result<Box<dyn Learner>> {
        let factory = self.factories.get(spec.kind.as_str()).ok_or_else(|| {
            Error::Config(format!(
                "unknown learner '{}' (known: {})",
                spec.kind,
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        Ok(factory(spec))
    }
}
