//! Dependent models: samplers, exact laws, and the coupled Glauber chain.

pub mod coupling;
pub mod curie_weiss;
pub mod ergm;
pub mod graph;
pub mod swr;

pub use coupling::{coupled_glauber_run, CoupledChainState, CoupledGlauber};
pub use curie_weiss::{cw_exact_magnetization_law, cw_glauber_step, CurieWeiss, CwChain, MagnetizationLaw, SpinConfiguration};
pub use ergm::{ergm_glauber_step, DeltaErgm, EdgeTriangleErgm, ErgmChain};
pub use graph::{subgraph_count, EdgeGraph, GraphMotif};
pub use swr::{weighted_swr_sample, weighted_swr_sample_clocks, IndexSample};
