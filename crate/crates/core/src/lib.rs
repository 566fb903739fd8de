//! Core of the Wi-Fi proximity authentication workspace.
//!
//! - [`rfsim`]: seedable 2-D indoor RF simulator producing beacon scans and
//!   labeled co-location datasets.
//! - [`ml`]: six from-scratch binary classifiers, splitting, metrics and
//!   feature importance.
//! - [`threat`]: evasion, model-extraction and interference experiments.
//!
//! Everything random is driven by explicit `u64` seeds; identical inputs give
//! bit-identical outputs.

pub mod data;
pub mod error;
pub mod ml;
pub mod rfsim;
pub mod seed;
pub mod threat;

pub use data::{Dataset, LabeledSet, Sample, FEATURE_NAMES, N_FEATURES, RSSI_FEATURE};
pub use error::{Error, Result};
pub use ml::{Algo, ConfusionMatrix, Hyperparams, Metrics, TrainedModel};
pub use rfsim::{Environment, ScanReport, SimConfig};
