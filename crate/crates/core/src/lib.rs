//! Staged minimum vertex cover through an auxiliary minimum-covering-computation
//! graph.
//!
//! The pipeline pads the input graph to order `2^k`, builds the auxiliary
//! graph `H` ([`mcc::build_h`]), then scans `H`'s components by grade for the
//! first nonempty maximal subgraph satisfying the cover conditions
//! ([`engine::solve`]). When the minimized subgraph is a clique its label set
//! is a minimum vertex cover.

pub mod bits;
pub mod container;
pub mod engine;
pub mod graph;
pub mod harness;
pub mod hyper;
pub mod labels;
pub mod mcc;
pub mod oracle;
pub mod verify;

pub use engine::{solve, SolveOptions, SolveResult, SolveStatus};
pub use graph::{pad_to_power_of_two, parse_graph, write_graph, LabeledGraph, PaddedGraph};
pub use labels::LabelSet;
pub use mcc::{build_h, MccGraph};
