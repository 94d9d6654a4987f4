//! Constructive reductions from 3-CNF satisfiability to vertex-disjoint
//! cycle packing, and from cycle packing on orthogonally embedded graphs to
//! Dots & Boxes and Dots & Simple Polygons positions. Every construction is
//! paired with a brute-force oracle that certifies it on small inputs.

use thiserror::Error;

pub mod cnf;
pub mod embedding;
pub mod gadget;
pub mod graph;
pub mod packing;
pub mod polygons;
pub mod to_boxes;

pub use cnf::CnfInstance;
pub use embedding::{OrthogonalEmbedding, Route};
pub use gadget::{sat_to_vcp, verify_reduction, GadgetGraph, GadgetOptions, Label, ReductionReport};
pub use graph::Graph;
pub use packing::{max_cycle_packing, vcp_oracle, Packing, VCP_ORACLE_BOUND};
pub use polygons::{controlled_scores_polygons, vcp_to_polygons, BellParameters};
pub use to_boxes::{commit_packing, vcp_to_boxes};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("invalid CNF: {0}")]
    InvalidCnf(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("{what} has size {size}, above the bound {bound}")]
    TooLarge { what: &'static str, size: usize, bound: usize },
    #[error("non-planar: {0}")]
    NonPlanar(String),
    #[error("embedding violation: {0}")]
    Embedding(String),
    #[error("bell template rejected: {0}")]
    Bell(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
