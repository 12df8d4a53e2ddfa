//! Autonomous feature engineering for tabular data.
//!
//! A run cleans a CSV table, routes it to a task kind, measures a baseline with
//! cross-validation and then repeatedly plans, validates, executes and scores
//! batches of feature actions, keeping only the changes that improve the score.

pub mod actions;
pub mod cleaning;
pub mod controller;
pub mod error;
pub mod eval;
pub mod planner;
pub mod routing;
pub mod synth;
pub mod table;

pub use error::{Error, Result};
