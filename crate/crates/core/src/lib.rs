//! Evaluation of binary classifiers on imbalanced data.
//!
//! Confusion-matrix metrics (including HMNC), pairwise classifier comparison,
//! and heat-map grids over the (TP, TN) plane.

pub mod analysis;
pub mod cli;
pub mod confusion;
pub mod error;
pub mod heatmap;
pub mod metrics;
pub mod repro;

pub use confusion::{confusion_from_labels, ConfusionMatrix, LabeledPredictions};
pub use error::{Error, Result};
pub use metrics::{evaluate_all, MetricId, MetricReport, MetricValues};
