//! Spectral and kernel analysis of weighted social graphs.
//!
//! The pipeline goes from contract records or an edge list to a weighted
//! graph, through the Laplacian spectrum and the diffusion kernel, to two
//! complementary views: combinatorial perfect communities with a rich-club
//! and central vertices, and a batch kernel self-organizing map.

pub mod cli;
pub mod communities;
pub mod dot;
pub mod error;
pub mod graph;
pub mod kernel;
pub mod som;
pub mod spectral;
pub mod synth;

pub use error::{Error, Result};
pub use graph::WeightedGraph;
