pub mod cli;
pub mod error;
pub mod families;
pub mod expansion;
pub mod graph;
pub mod partitioner;
pub mod ratio;
pub mod spectral;
pub mod verifier;

pub use error::{Error, Result};
pub use graph::{Graph, KPartition, VertexSet};
pub use ratio::Ratio;
