//! Graph bootstrap percolation with and without pollution.

mod engine;
mod gadget;
mod graph;
mod montecarlo;
mod pollution;

use thiserror::Error;

pub use engine::{
    closure, polluted_closure, run_closure, AnyBase, AvoidPolluted, BaseRule, ClosureStats,
};
pub use gadget::{build_gadget, GadgetDescriptor};
pub use graph::SimpleGraph;
pub use montecarlo::{estimate_percolation_probability, percolates, sample_gnp};
pub use pollution::PollutionSet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PercolationError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("pollution member has {got} distinct vertices, expected {expected}")]
    BaseSize { expected: usize, got: usize },
    #[error("pollution family is for d = {got}, closure asked for d = {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gadget needs d >= 1 and r >= 1, got d = {d}, r = {r}")]
    InvalidGadget { d: usize, r: usize },
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("clique size must be at least 3, got {0}")]
    CliqueSize(usize),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("invalid pollution JSON: {0}")]
    Json(String),
}
