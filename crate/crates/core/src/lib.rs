//! Distributed property testing on a simulated CONGEST network.
//!
//! The crate bundles a deterministic round-synchronous simulator with four
//! distributed property tests (dense-model emulation, triangle-freeness,
//! bipartiteness via lazy random walks, cycle-freeness via prioritized BFS),
//! exact centralized oracles that certify how far instances are from each
//! property, and generators for certified test instances.

pub mod bipartite;
pub mod cycle;
pub mod emulation;
pub mod error;
pub mod generators;
pub mod graph;
pub mod oracle;
pub mod sim;
pub mod triangle;

pub use error::{Error, Result};
pub use graph::{DegreeBound, Graph, VertexId};
pub use sim::{RejectionStats, SimConfig, Transcript};
