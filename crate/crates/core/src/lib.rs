//! Local computation algorithms for maximal independent set, maximal matching,
//! approximate MIS and approximate maximum matching on bounded-degree graphs.
//!
//! Every algorithm reads its input through an [`graph::Oracle`] and draws all
//! randomness from a [`pseudorandom::SeedBundle`], so each answer is a pure
//! function of `(graph, seed, query)`.

pub mod amm;
pub mod error;
pub mod graph;
pub mod greedy;
pub mod matching;
pub mod pseudorandom;
pub mod verify;
pub mod weak_mis;

pub use error::LcaError;
pub use graph::{
    gen_graph, load_graph, CountingOracle, EdgeId, GenKind, GraphError, GraphStore, InducedView,
    LineGraphView, Oracle, OracleError, QueryTally, VertexId,
};
pub use pseudorandom::{MasterSeed, SeedBundle};
