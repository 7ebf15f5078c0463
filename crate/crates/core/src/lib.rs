//! Exact integer machinery for walking the 1-skeleton of transportation
//! polytopes and their faces.
//!
//! Vertices of a non-degenerate transportation polytope `TP(u, v)` are
//! spanning trees of the bipartite supply/demand graph carrying strictly
//! positive flow. This crate provides:
//!
//! - [`instance`]: margins, forbidden edges, validation and the subset-sum
//!   non-degeneracy test,
//! - [`tree`]: flows on spanning trees by leaf elimination and pivots,
//! - [`walk`]: the shading walk between two vertices whose length never
//!   exceeds `N1 + N2 - 1 - mu`, with its structural diagnostics,
//! - [`oracle`]: brute-force vertex enumeration, skeleton distances and
//!   critical pairs,
//! - [`reduction`]: capacitated network-flow polytopes as faces of
//!   transportation polytopes.
//!
//! Everything is integer arithmetic; no operation rounds.
#![no_std]

extern crate alloc;

pub mod instance;
mod maxflow;
pub mod oracle;
pub mod reduction;
pub mod tree;
pub mod walk;

pub use instance::{Edge, InstanceError, Node, Nondegeneracy, TransportationInstance, ValidationReport};
pub use tree::{FlowedTree, PivotOutcome, TreeError, VertexStatus};
