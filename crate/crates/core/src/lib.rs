//! Simulation core for dual-cache mini-batch preparation in sampling-based
//! GNN inference.
//!
//! The crate models the data-movement side of neighbor-sampled inference on a
//! host/device memory hierarchy: a CSC adjacency store, layer-wise neighbor
//! sampling, pre-sampling workload profiling, time-proportional cache capacity
//! allocation, two static device caches (adjacency elements and node feature
//! rows), and an analytical cost model that prices every access as a cache hit
//! or a host-side miss.
//!
//! Everything here is deterministic given explicit seeds and performs no I/O;
//! file formats and the command-line driver live in the companion `dualcache`
//! crate. The crate is `no_std` (with `alloc`) so the simulation kernel stays
//! free of platform dependencies.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adj_cache;
pub mod budget;
pub mod cost;
pub mod driver;
pub mod error;
pub mod feat_cache;
pub mod graph;
pub mod profile;
pub mod sampler;

pub use adj_cache::{adj_hit_rate, fill_adj_cache, AdjCache, AdjLookup};
pub use budget::{allocate, available_budget, split_budget, CacheBudget};
pub use cost::{price_batch, CostParams};
pub use driver::{compare_strategies, fill_knapsack, run_inference, ExperimentSpec, RunReport, Strategy};
pub use error::{Error, Result};
pub use feat_cache::{fill_feat_cache, FeatCache, FeatLookup};
pub use graph::{csc_byte_volume, generate_power_law, AccessCounts, CscGraph, NodeId};
pub use profile::{peak_workload_estimate, presample, WorkloadProfile};
pub use sampler::{
    batch_rng, partition_seeds, redundancy_factor, redundancy_from_counts, sample_minibatch,
    MiniBatchTrace, SamplingConfig,
};
