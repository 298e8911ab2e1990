//! CSC graph storage, per-element access counters, and synthetic graph
//! generation.
//!
//! The adjacency structure is held in compressed sparse column form: for each
//! destination node, `col_ptr` delimits a contiguous run of in-neighbor ids in
//! `row_index`, with one opaque edge payload per element in `values`. Sampling
//! reads in-neighbors, so edge lists are grouped by destination.
//!
//! Node features are never materialized; the graph only carries their shape
//! (`feat_dim` scalars of `feat_bytes_per_scalar` bytes each) because the cost
//! model and cache budgets need sizes, not values.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Node identifier; ids are dense in `0..num_nodes`.
pub type NodeId = usize;

/// Feature shape given to generated graphs: 100 scalars of 4 bytes, the shape
/// of a typical mid-size product graph.
pub const DEFAULT_FEAT_DIM: u32 = 100;
pub const DEFAULT_FEAT_BYTES_PER_SCALAR: u32 = 4;

/// Adjacency structure in compressed sparse column form.
///
/// Invariants (checked by [`CscGraph::validate`], enforced at construction):
/// - `col_ptr` is monotone non-decreasing, starts at 0, has `num_nodes + 1`
///   entries, and ends at `num_edges`;
/// - every `row_index` entry is a valid node id;
/// - `row_index` and `values` have equal length.
///
/// The structure is immutable after construction and safe to share across
/// concurrent readers.
#[derive(Debug, Clone, PartialEq)]
pub struct CscGraph {
    num_nodes: usize,
    col_ptr: Vec<usize>,
    row_index: Vec<NodeId>,
    values: Vec<f64>,
    feat_dim: u32,
    feat_bytes_per_scalar: u32,
}

impl CscGraph {
    /// Builds a graph from raw CSC arrays, validating every invariant.
    pub fn new(
        num_nodes: usize,
        col_ptr: Vec<usize>,
        row_index: Vec<NodeId>,
        values: Vec<f64>,
        feat_dim: u32,
        feat_bytes_per_scalar: u32,
    ) -> Result<Self> {
        let graph = Self {
            num_nodes,
            col_ptr,
            row_index,
            values,
            feat_dim,
            feat_bytes_per_scalar,
        };
        graph.validate()?;
        Ok(graph)
    }

    /// Builds a graph from `(src, dst)` edges, grouping in-neighbors per
    /// destination node while preserving input order within each group.
    ///
    /// `num_nodes` may be given explicitly (to include isolated trailing
    /// nodes); otherwise it is inferred as `max id + 1`. Edge payloads are
    /// filled with a placeholder weight of 1.0.
    pub fn from_edge_list(
        edges: &[(NodeId, NodeId)],
        num_nodes: Option<usize>,
        feat_dim: u32,
        feat_bytes_per_scalar: u32,
    ) -> Result<Self> {
        let inferred = edges
            .iter()
            .map(|&(s, d)| s.max(d) + 1)
            .max()
            .unwrap_or(0);
        let n = match num_nodes {
            Some(n) => {
                if inferred > n {
                    return Err(Error::InvalidArgument(format!(
                        "edge references node {} but num_nodes is {n}",
                        inferred - 1
                    )));
                }
                n
            }
            None => inferred,
        };

        let mut col_ptr = vec![0usize; n + 1];
        for &(_, dst) in edges {
            col_ptr[dst + 1] += 1;
        }
        for i in 0..n {
            col_ptr[i + 1] += col_ptr[i];
        }
        let mut cursor = col_ptr.clone();
        let mut row_index = vec![0 as NodeId; edges.len()];
        for &(src, dst) in edges {
            row_index[cursor[dst]] = src;
            cursor[dst] += 1;
        }
        let values = vec![1.0; edges.len()];
        Self::new(n, col_ptr, row_index, values, feat_dim, feat_bytes_per_scalar)
    }

    /// Checks the CSC invariants, naming the first one violated.
    pub fn validate(&self) -> Result<()> {
        if self.col_ptr.len() != self.num_nodes + 1 {
            return Err(Error::InvalidGraph(format!(
                "col_ptr has {} entries, expected num_nodes + 1 = {}",
                self.col_ptr.len(),
                self.num_nodes + 1
            )));
        }
        if self.col_ptr[0] != 0 {
            return Err(Error::InvalidGraph(format!(
                "col_ptr[0] is {}, expected 0",
                self.col_ptr[0]
            )));
        }
        for i in 0..self.num_nodes {
            if self.col_ptr[i + 1] < self.col_ptr[i] {
                return Err(Error::InvalidGraph(format!(
                    "col_ptr is not monotone at node {i}: {} > {}",
                    self.col_ptr[i],
                    self.col_ptr[i + 1]
                )));
            }
        }
        let num_edges = self.col_ptr[self.num_nodes];
        if self.row_index.len() != num_edges {
            return Err(Error::InvalidGraph(format!(
                "row_index has {} entries but col_ptr ends at {num_edges}",
                self.row_index.len()
            )));
        }
        if self.values.len() != num_edges {
            return Err(Error::InvalidGraph(format!(
                "values has {} entries but row_index has {num_edges}",
                self.values.len()
            )));
        }
        for (i, &r) in self.row_index.iter().enumerate() {
            if r >= self.num_nodes {
                return Err(Error::InvalidGraph(format!(
                    "row_index[{i}] = {r} is out of range for {} nodes",
                    self.num_nodes
                )));
            }
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.row_index.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_index(&self) -> &[NodeId] {
        &self.row_index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// In-degree of `node`.
    pub fn degree(&self, node: NodeId) -> usize {
        self.col_ptr[node + 1] - self.col_ptr[node]
    }

    /// In-neighbor ids of `node` in storage order.
    pub fn in_neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.row_index[self.col_ptr[node]..self.col_ptr[node + 1]]
    }

    /// Position of `node`'s `rank`-th adjacency element in the flat arrays.
    pub fn edge_index(&self, node: NodeId, rank: usize) -> usize {
        debug_assert!(rank < self.degree(node));
        self.col_ptr[node] + rank
    }

    /// In-neighbor stored at `rank` within `node`'s run.
    pub fn neighbor_at(&self, node: NodeId, rank: usize) -> NodeId {
        self.row_index[self.edge_index(node, rank)]
    }

    pub fn value_at(&self, node: NodeId, rank: usize) -> f64 {
        self.values[self.edge_index(node, rank)]
    }

    pub fn feat_dim(&self) -> u32 {
        self.feat_dim
    }

    pub fn feat_bytes_per_scalar(&self) -> u32 {
        self.feat_bytes_per_scalar
    }

    /// Bytes occupied by one node's feature row.
    pub fn feat_row_bytes(&self) -> u64 {
        self.feat_dim as u64 * self.feat_bytes_per_scalar as u64
    }

    /// Returns the same structure with a different feature shape.
    pub fn with_feature_shape(mut self, feat_dim: u32, feat_bytes_per_scalar: u32) -> Self {
        self.feat_dim = feat_dim;
        self.feat_bytes_per_scalar = feat_bytes_per_scalar;
        self
    }

    /// Total bytes of the dataset: the CSC structure plus every feature row.
    /// Fractional cache budgets are expressed against this quantity.
    pub fn total_data_bytes(&self, index_bytes: u64, value_bytes: u64) -> u64 {
        csc_byte_volume(self, index_bytes, value_bytes)
            + self.num_nodes as u64 * self.feat_row_bytes()
    }
}

/// Storage volume of the CSC arrays: `(num_nodes + 1) * index_bytes` for the
/// column pointers plus `num_edges * (index_bytes + value_bytes)` for the
/// row indices and payloads. Column pointers are counted so that cache budget
/// accounting covers everything the cache actually holds.
pub fn csc_byte_volume(graph: &CscGraph, index_bytes: u64, value_bytes: u64) -> u64 {
    (graph.num_nodes as u64 + 1) * index_bytes
        + graph.num_edges() as u64 * (index_bytes + value_bytes)
}

/// Pre-sampling access counters, aligned element-for-element with a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessCounts {
    /// Times each adjacency element was touched, indexed like `row_index`.
    pub edge_counts: Vec<u64>,
    /// Times each node's feature row was requested, indexed by node id.
    pub node_visits: Vec<u64>,
}

impl AccessCounts {
    pub fn zeroed(graph: &CscGraph) -> Self {
        Self {
            edge_counts: vec![0; graph.num_edges()],
            node_visits: vec![0; graph.num_nodes()],
        }
    }

    /// Verifies the counter arrays line up with `graph`.
    pub fn check_aligned(&self, graph: &CscGraph) -> Result<()> {
        if self.edge_counts.len() != graph.num_edges() {
            return Err(Error::InvalidArgument(format!(
                "edge_counts has {} entries for a graph with {} edges",
                self.edge_counts.len(),
                graph.num_edges()
            )));
        }
        if self.node_visits.len() != graph.num_nodes() {
            return Err(Error::InvalidArgument(format!(
                "node_visits has {} entries for a graph with {} nodes",
                self.node_visits.len(),
                graph.num_nodes()
            )));
        }
        Ok(())
    }

    /// Total accesses recorded to elements of `node`.
    pub fn node_total(&self, graph: &CscGraph, node: NodeId) -> u64 {
        let start = graph.col_ptr()[node];
        let end = graph.col_ptr()[node + 1];
        self.edge_counts[start..end].iter().sum()
    }
}

/// Generates a graph whose in-degree sequence follows a discrete power law
/// with the given tail exponent, scaled so the edge total equals
/// `round(num_nodes * avg_degree)`.
///
/// Construction: per-rank weights `(rank+1)^(-1/(exponent-1))` are scaled to
/// the target edge count and rounded by largest remainder, the degree sequence
/// is shuffled onto node ids, and each in-stub is connected to a uniformly
/// random source. Self-loops and multi-edges are kept. Deterministic for a
/// fixed seed (ChaCha8, stream 0).
pub fn generate_power_law(
    num_nodes: usize,
    avg_degree: f64,
    exponent: f64,
    seed: u64,
) -> Result<CscGraph> {
    if num_nodes == 0 {
        return Err(Error::InvalidArgument("num_nodes must be at least 1".into()));
    }
    if !(avg_degree > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "avg_degree must be positive, got {avg_degree}"
        )));
    }
    if !(exponent > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "exponent must be greater than 1, got {exponent}"
        )));
    }

    let n = num_nodes;
    let target = libm::round(n as f64 * avg_degree) as u64;
    let rank_exp = 1.0 / (exponent - 1.0);

    let weights: Vec<f64> = (0..n)
        .map(|i| libm::pow((i + 1) as f64, -rank_exp))
        .collect();
    let weight_sum: f64 = weights.iter().sum();
    let scale = target as f64 / weight_sum;

    // Largest-remainder rounding keeps the edge total exact.
    let mut degrees: Vec<u64> = Vec::with_capacity(n);
    let mut fractions: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut assigned: u64 = 0;
    for (i, &w) in weights.iter().enumerate() {
        let raw = w * scale;
        let base = libm::floor(raw) as u64;
        degrees.push(base);
        assigned += base;
        fractions.push((raw - base as f64, i));
    }
    fractions.sort_unstable_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    let mut remainder = target.saturating_sub(assigned);
    let mut cursor = 0usize;
    while remainder > 0 {
        degrees[fractions[cursor % n].1] += 1;
        remainder -= 1;
        cursor += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    degrees.shuffle(&mut rng);

    let mut col_ptr = Vec::with_capacity(n + 1);
    col_ptr.push(0usize);
    let mut total = 0usize;
    for &d in &degrees {
        total += d as usize;
        col_ptr.push(total);
    }
    let mut row_index = Vec::with_capacity(total);
    for &d in &degrees {
        for _ in 0..d {
            row_index.push(rng.random_range(0..n));
        }
    }
    let values = vec![1.0; total];

    CscGraph::new(
        n,
        col_ptr,
        row_index,
        values,
        DEFAULT_FEAT_DIM,
        DEFAULT_FEAT_BYTES_PER_SCALAR,
    )
}
