//! Layer-wise neighbor sampling with access tracing.
//!
//! Each mini-batch starts from a chunk of seed nodes and expands layer by
//! layer: every frontier node contributes `min(fan_out, degree)` distinct
//! neighbor ranks drawn uniformly without replacement. Every adjacency access
//! and every (per-batch deduplicated) feature request is recorded with a
//! hit/miss flag taken from the caches when they are attached.
//!
//! Neighbor identity is always resolved against the base graph's storage
//! order, and cache lookups contribute only the hit/miss classification. Runs
//! that differ solely in cache configuration therefore sample identical
//! workloads, which is what makes strategy comparisons exact: caches influence
//! access pricing, never what is sampled.
//!
//! Randomness comes from ChaCha8 with one substream per batch, derived from
//! `(seed, batch index)`, so batches can be produced in any order or
//! concurrently without perturbing each other.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adj_cache::AdjCache;
use crate::error::{Error, Result};
use crate::feat_cache::FeatCache;
use crate::graph::{CscGraph, NodeId};

/// Mini-batch shape: seeds per batch and per-layer neighbor counts.
///
/// `fan_outs` is listed outermost layer first (the convention of the usual
/// `"15,10,5"` notation); expansion from the seeds applies the entries in
/// reverse, so the last entry governs the hop adjacent to the seeds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub batch_size: usize,
    pub fan_outs: Vec<usize>,
    pub rng_seed: u64,
}

impl SamplingConfig {
    pub fn new(batch_size: usize, fan_outs: Vec<usize>, rng_seed: u64) -> Result<Self> {
        let config = Self {
            batch_size,
            fan_outs,
            rng_seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch_size must be at least 1".into()));
        }
        if self.fan_outs.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one sampling layer is required".into(),
            ));
        }
        if self.fan_outs.iter().any(|&f| f == 0) {
            return Err(Error::InvalidArgument("every fan-out must be at least 1".into()));
        }
        Ok(())
    }
}

/// One recorded adjacency access: the `rank`-th element of `node`'s run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdjAccess {
    pub node: NodeId,
    pub rank: usize,
    pub hit: bool,
}

/// One recorded feature-row request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatRequest {
    pub node: NodeId,
    pub hit: bool,
}

/// Everything one mini-batch touched.
#[derive(Debug, Clone, PartialEq)]
pub struct MiniBatchTrace {
    pub seed_nodes: Vec<NodeId>,
    /// Adjacency accesses per hop, ordered outward from the seeds.
    pub layer_accesses: Vec<Vec<AdjAccess>>,
    /// Feature requests, deduplicated within the batch (seeds first, then

    /// sampled nodes in discovery order).
    pub feature_requests: Vec<FeatRequest>,
    pub unique_input_nodes: usize,
}

impl MiniBatchTrace {
    pub fn total_adj_accesses(&self) -> usize {
        self.layer_accesses.iter().map(|l| l.len()).sum()
    }
}

/// Splits `test_nodes` into contiguous chronological chunks of `batch_size`;
/// the last chunk may be short.
pub fn partition_seeds(test_nodes: &[NodeId], batch_size: usize) -> Result<Vec<Vec<NodeId>>> {
    if test_nodes.is_empty() {
        return Err(Error::InvalidArgument("test_nodes must be non-empty".into()));
    }
    if batch_size == 0 {
        return Err(Error::InvalidArgument("batch_size must be at least 1".into()));
    }
    Ok(test_nodes.chunks(batch_size).map(|c| c.to_vec()).collect())
}

/// RNG substream for one batch: ChaCha8 seeded with the global seed, with the
/// batch index (plus one, keeping stream 0 free for other consumers) selecting
/// the stream.
pub fn batch_rng(seed: u64, batch_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch_index.wrapping_add(1));
    rng
}

/// Samples one mini-batch, classifying each access against the caches when
/// they are attached (every access is a miss otherwise).
pub fn sample_minibatch(
    graph: &CscGraph,
    seeds: &[NodeId],
    config: &SamplingConfig,
    adj_cache: Option<&AdjCache>,
    feat_cache: Option<&FeatCache>,
    rng: &mut ChaCha8Rng,
) -> Result<MiniBatchTrace> {
    config.validate()?;
    let n = graph.num_nodes();
    for &s in seeds {
        if s >= n {
            return Err(Error::InvalidArgument(format!(
                "seed node {s} out of range for {n} nodes"
            )));
        }
    }

    // Per-batch dedup state for feature requests (seeds count as inputs too).
    let mut touched = vec![false; n];
    let mut request_order: Vec<NodeId> = Vec::new();
    let mut frontier: Vec<NodeId> = Vec::with_capacity(seeds.len());
    for &s in seeds {
        if !touched[s] {
            touched[s] = true;
            request_order.push(s);
            frontier.push(s);
        }
    }

    let mut layer_accesses: Vec<Vec<AdjAccess>> = Vec::with_capacity(config.fan_outs.len());
    for &fan_out in config.fan_outs.iter().rev() {
        let mut accesses: Vec<AdjAccess> = Vec::new();
        let mut next: Vec<NodeId> = Vec::new();
        let mut on_next = vec![false; n];
        for &v in &frontier {
            let deg = graph.degree(v);
            let k = fan_out.min(deg);
            if k == 0 {
                continue;
            }
            let picks = rand::seq::index::sample(rng, deg, k);
            for rank in picks {
                let hit = match adj_cache {
                    Some(cache) => cache.lookup(v, rank)?.is_hit(),
                    None => false,
                };
                accesses.push(AdjAccess { node: v, rank, hit });
                let neighbor = graph.neighbor_at(v, rank);
                if !touched[neighbor] {
                    touched[neighbor] = true;
                    request_order.push(neighbor);
                }
                if !on_next[neighbor] {
                    on_next[neighbor] = true;
                    next.push(neighbor);
                }
            }
        }
        layer_accesses.push(accesses);
        frontier = next;
    }

    let feature_requests: Vec<FeatRequest> = request_order
        .iter()
        .map(|&node| FeatRequest {
            node,
            hit: feat_cache.map_or(false, |c| c.lookup(node).is_hit()),
        })
        .collect();
    let unique_input_nodes = feature_requests.len();

    Ok(MiniBatchTrace {
        seed_nodes: seeds.to_vec(),
        layer_accesses,
        feature_requests,
        unique_input_nodes,
    })
}

/// Cross-batch redundancy: total feature rows loaded divided by the number of
/// distinct test nodes (the Load/Test ratio).
pub fn redundancy_factor(traces: &[MiniBatchTrace], test_node_count: usize) -> f64 {
    let loaded: u64 = traces.iter().map(|t| t.feature_requests.len() as u64).sum();
    redundancy_from_counts(loaded, test_node_count as u64)
}

/// Load/Test ratio from raw totals.
pub fn redundancy_from_counts(loaded: u64, test_node_count: u64) -> f64 {
    debug_assert!(test_node_count >= 1);
    loaded as f64 / test_node_count as f64
}
