//! Trials, threshold scans and report emission.

mod config;
mod emit;
mod scan;
mod theory;
mod trials;

use thiserror::Error;

pub use config::{Config, ScanConfig, ScanTarget, TrialsConfig, SCHEMA_VERSION};
pub use emit::{emit, emit_trials, scan_csv, scan_svg, to_json, trials_csv, write_file, Format};
pub use scan::{
    fit_log_log, half_crossing, scan_threshold, Crossing, LogLogFit, ScanCell, ScanResult,
};
pub use theory::{eta, eta_closed_form, eta_f64, p_star};
pub use trials::{max_distance_error, run_single_trial, run_trials, TrialReport, TrialRun};

use crate::percolation::PercolationError;
use crate::reconstruct::ReconstructError;
use crate::sim::SimError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("dimension must be at least 1, got {0}")]
    InvalidDimension(usize),
    #[error("need n >= 3, got {0}")]
    TooFewPoints(usize),
    #[error("config error: {0}")]
    Config(String),
    #[error("probability curve for n = {n} never crosses 1/2 inside the grid")]
    Unbracketed { n: usize },
    #[error("nothing to plot")]
    EmptyResults,
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
    #[error(transparent)]
    Percolation(#[from] PercolationError),
}
