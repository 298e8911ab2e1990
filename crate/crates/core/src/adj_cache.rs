//! Static adjacency-element cache.
//!
//! Filling reorders the counted CSC structure with a two-level sort — nodes by
//! descending total access count, then each node's elements by descending
//! per-element count — and admits elements in that global order until the next
//! element would exceed the byte budget. The counts themselves are not stored.
//! When the whole structure fits in the budget it is cached verbatim with no
//! reordering.
//!
//! The host-side copy is reordered the same way at fill time, so a rank always
//! refers to the same position whether it is served from the cache prefix or
//! from the host: a lookup of rank `k` hits iff `k < cached_len[node]`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::error::{Error, Result};
use crate::graph::{csc_byte_volume, AccessCounts, CscGraph, NodeId};

const NOT_CACHED: usize = usize::MAX;

/// Immutable adjacency cache; safe for concurrent lookups after fill.
#[derive(Debug, Clone)]
pub struct AdjCache {
    /// Original node id -> position in cache order.
    node_order: Vec<usize>,
    /// Position in cache order -> original node id.
    order_to_node: Vec<NodeId>,
    /// Original node id -> slot in `new_col_ptr` space, `NOT_CACHED` if the
    /// node has no cached prefix.
    cache_slot: Vec<usize>,
    /// Offsets of each cached node's run inside the cached arrays.
    new_col_ptr: Vec<usize>,
    new_row_index: Vec<NodeId>,
    new_values: Vec<f64>,
    /// Number of each node's elements resident in cache (original id index).
    cached_len: Vec<usize>,
    /// Each node's full degree (original id index).
    original_len: Vec<usize>,
    /// Reordered host copy: the full CSC structure in cache order, used to
    /// resolve ranks past the cached prefix.
    host_col_ptr: Vec<usize>,
    host_row_index: Vec<NodeId>,
    host_values: Vec<f64>,
    /// Reordered element slot -> original edge index.
    host_perm: Vec<usize>,
    index_bytes: u64,
    value_bytes: u64,
}

/// Result of an adjacency-cache lookup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdjLookup {
    Hit { neighbor: NodeId, value: f64 },
    Miss,
}

impl AdjLookup {
    pub fn is_hit(&self) -> bool {
        matches!(self, AdjLookup::Hit { .. })
    }
}

/// Two-level-sorted layout of a counted CSC structure: node order plus the
/// per-node element permutation, shared by the budget-prefix fill and the
/// knapsack baseline.
pub(crate) struct SortedLayout {
    pub order_to_node: Vec<NodeId>,
    /// Cache position -> start of the node's run in `perm`.
    pub host_col_ptr: Vec<usize>,
    /// Reordered element slot -> original edge index.
    pub perm: Vec<usize>,
}

pub(crate) fn sorted_layout(graph: &CscGraph, counts: &AccessCounts) -> SortedLayout {
    let n = graph.num_nodes();
    let col_ptr = graph.col_ptr();

    let node_totals: Vec<u64> = (0..n).map(|v| counts.node_total(graph, v)).collect();
    let mut order_to_node: Vec<NodeId> = (0..n).collect();
    order_to_node.sort_unstable_by_key(|&v| (Reverse(node_totals[v]), v));

    let mut perm = Vec::with_capacity(graph.num_edges());
    let mut host_col_ptr = Vec::with_capacity(n + 1);
    host_col_ptr.push(0);
    let mut positions: Vec<usize> = Vec::new();
    for &v in &order_to_node {
        let start = col_ptr[v];
        let deg = col_ptr[v + 1] - start;
        positions.clear();
        positions.extend(0..deg);
        positions.sort_unstable_by_key(|&p| (Reverse(counts.edge_counts[start + p]), p));
        for &p in &positions {
            perm.push(start + p);
        }
        host_col_ptr.push(perm.len());
    }

    SortedLayout {
        order_to_node,
        host_col_ptr,
        perm,
    }
}

/// Assembles a cache from a layout and per-node cached lengths (`quotas`,
/// indexed by original node id).
pub(crate) fn assemble(
    graph: &CscGraph,
    layout: SortedLayout,
    quotas: Vec<usize>,
    index_bytes: u64,
    value_bytes: u64,
) -> AdjCache {
    let n = graph.num_nodes();
    let SortedLayout {
        order_to_node,
        host_col_ptr,
        perm,
    } = layout;

    let mut node_order = vec![0usize; n];
    for (pos, &v) in order_to_node.iter().enumerate() {
        node_order[v] = pos;
    }

    let row_index = graph.row_index();
    let values = graph.values();
    let host_row_index: Vec<NodeId> = perm.iter().map(|&e| row_index[e]).collect();
    let host_values: Vec<f64> = perm.iter().map(|&e| values[e]).collect();

    let cached_elements: usize = quotas.iter().sum();
    let mut cache_slot = vec![NOT_CACHED; n];
    let mut new_col_ptr = Vec::new();
    let mut new_row_index = Vec::with_capacity(cached_elements);
    let mut new_values = Vec::with_capacity(cached_elements);
    for (pos, &v) in order_to_node.iter().enumerate() {
        let quota = quotas[v];
        if quota == 0 {
            continue;
        }
        if new_col_ptr.is_empty() {
            new_col_ptr.push(0);
        }
        cache_slot[v] = new_col_ptr.len() - 1;
        let start = host_col_ptr[pos];
        new_row_index.extend_from_slice(&host_row_index[start..start + quota]);
        new_values.extend_from_slice(&host_values[start..start + quota]);
        new_col_ptr.push(new_row_index.len());
    }

    let original_len: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();

    AdjCache {
        node_order,
        order_to_node,
        cache_slot,
        new_col_ptr,
        new_row_index,
        new_values,
        cached_len: quotas,
        original_len,
        host_col_ptr,
        host_row_index,
        host_values,
        host_perm: perm,
        index_bytes,
        value_bytes,
    }
}

/// Fills the adjacency cache from pre-sampling counts under a byte budget.
///
/// If the whole CSC structure fits (see [`csc_byte_volume`]) it is cached
/// verbatim. Otherwise elements are admitted in two-level-sorted order (node
/// totals descending with ties by ascending id, then per-element counts
/// descending with ties by ascending original position) until the next
/// element would exceed `budget`; a node split by the cutoff keeps exactly
/// the prefix that fits. Byte accounting charges each element
/// `index_bytes + value_bytes` plus one column-pointer entry the first time a
/// node appears (and one extra for the leading entry), so the resident arrays
/// never exceed the budget.
pub fn fill_adj_cache(
    graph: &CscGraph,
    counts: &AccessCounts,
    budget: u64,
    index_bytes: u64,
    value_bytes: u64,
) -> Result<AdjCache> {
    counts.check_aligned(graph)?;
    let n = graph.num_nodes();

    if csc_byte_volume(graph, index_bytes, value_bytes) <= budget {
        // Whole-structure case: no reordering, identity layout.
        let layout = SortedLayout {
            order_to_node: (0..n).collect(),
            host_col_ptr: graph.col_ptr().to_vec(),
            perm: (0..graph.num_edges()).collect(),
        };
        let quotas: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();
        let mut cache = assemble(graph, layout, quotas, index_bytes, value_bytes);
        // Keep the full column-pointer array, matching the verbatim copy.
        cache.new_col_ptr = graph.col_ptr().to_vec();
        cache.cache_slot = (0..n).collect();
        return Ok(cache);
    }

    let layout = sorted_layout(graph, counts);
    let elem_bytes = index_bytes + value_bytes;
    let mut quotas = vec![0usize; n];
    let mut bytes = 0u64;
    let mut any = false;
    'admit: for (pos, &v) in layout.order_to_node.iter().enumerate() {
        let deg = layout.host_col_ptr[pos + 1] - layout.host_col_ptr[pos];
        for _ in 0..deg {
            let mut cost = elem_bytes;
            if quotas[v] == 0 {
                cost += index_bytes;
                if !any {
                    cost += index_bytes;
                }
            }
            if bytes + cost > budget {
                break 'admit;
            }
            bytes += cost;
            quotas[v] += 1;
            any = true;
        }
    }

    Ok(assemble(graph, layout, quotas, index_bytes, value_bytes))
}

impl AdjCache {
    /// Looks up the `rank`-th element of `node`'s reordered run.
    ///
    /// Hits iff `rank < cached_len[node]`; a miss means the element lives past
    /// the cached prefix and must be served from the host copy, which returns
    /// the identical neighbor (see [`AdjCache::host_neighbor`]).
    pub fn lookup(&self, node: NodeId, rank: usize) -> Result<AdjLookup> {
        if node >= self.original_len.len() {
            return Err(Error::InvalidArgument(format!(
                "node {node} out of range for {} nodes",
                self.original_len.len()
            )));
        }
        if rank >= self.original_len[node] {
            return Err(Error::InvalidArgument(format!(
                "rank {rank} out of range for node {node} with degree {}",
                self.original_len[node]
            )));
        }
        if rank < self.cached_len[node] {
            let off = self.new_col_ptr[self.cache_slot[node]] + rank;
            Ok(AdjLookup::Hit {
                neighbor: self.new_row_index[off],
                value: self.new_values[off],
            })
        } else {
            Ok(AdjLookup::Miss)
        }
    }

    /// Resolves `rank` through the reordered host copy (the miss path).
    pub fn host_neighbor(&self, node: NodeId, rank: usize) -> (NodeId, f64) {
        debug_assert!(rank < self.original_len[node]);
        let idx = self.host_col_ptr[self.node_order[node]] + rank;
        (self.host_row_index[idx], self.host_values[idx])
    }

    pub fn cached_len(&self, node: NodeId) -> usize {
        self.cached_len[node]
    }

    pub fn original_len(&self, node: NodeId) -> usize {
        self.original_len[node]
    }

    pub fn num_nodes(&self) -> usize {
        self.original_len.len()
    }

    /// Cache-order position of `node`.
    pub fn node_position(&self, node: NodeId) -> usize {
        self.node_order[node]
    }

    /// Original node id at cache-order `position`.
    pub fn node_at_position(&self, position: usize) -> NodeId {
        self.order_to_node[position]
    }

    pub fn new_col_ptr(&self) -> &[usize] {
        &self.new_col_ptr
    }

    pub fn new_row_index(&self) -> &[NodeId] {
        &self.new_row_index
    }

    pub fn new_values(&self) -> &[f64] {
        &self.new_values
    }

    /// Number of adjacency elements resident in the cache.
    pub fn cached_elements(&self) -> usize {
        self.new_row_index.len()
    }

    /// Bytes occupied by the cached arrays (column pointers included).
    pub fn cached_bytes(&self) -> u64 {
        self.new_col_ptr.len() as u64 * self.index_bytes
            + self.new_row_index.len() as u64 * (self.index_bytes + self.value_bytes)
    }

    /// Original edge indices of every cached element, for diagnostics and
    /// oracle comparisons.
    pub fn admitted_edge_indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.cached_elements());
        for (pos, &v) in self.order_to_node.iter().enumerate() {
            let start = self.host_col_ptr[pos];
            out.extend_from_slice(&self.host_perm[start..start + self.cached_len[v]]);
        }
        out
    }

    /// Per-node `(node, original_len, cached_len)` rows for the debug dump.
    pub fn summary_rows(&self) -> impl Iterator<Item = (NodeId, usize, usize)> + '_ {
        (0..self.original_len.len()).map(move |v| (v, self.original_len[v], self.cached_len[v]))
    }
}

/// Hit ratio, defined as 1.0 when nothing was accessed.
pub fn adj_hit_rate(hits: u64, total: u64) -> f64 {
    if total == 0 {
        1.0
    } else {
        hits as f64 / total as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_power_law;
    use alloc::collections::BTreeSet;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Node 0 holds elements {4,6,7} totaling 22 accesses, node 1 two
    /// elements totaling 12, node 2 two elements of which one fits.
    fn counted_example() -> (CscGraph, AccessCounts) {
        let graph = CscGraph::from_edge_list(
            &[(4, 0), (6, 0), (7, 0), (2, 1), (3, 1), (0, 2), (1, 2)],
            Some(8),
            1,
            4,
        )
        .unwrap();
        let counts = AccessCounts {
            edge_counts: vec![5, 7, 10, 6, 6, 3, 1],
            node_visits: vec![0; 8],
        };
        (graph, counts)
    }

    #[test]
    fn two_level_sort_orders_hot_node_first_and_elements_descending() {
        let (graph, counts) = counted_example();
        // Budget admits node 0 (3 elements), node 1 (2), and one of node 2's:
        // 4 column pointers + 6 elements at 8/8 bytes.
        let cache = fill_adj_cache(&graph, &counts, 128, 8, 8).unwrap();

        assert_eq!(cache.node_position(0), 0);
        assert_eq!(cache.node_position(1), 1);
        assert_eq!(&cache.new_row_index()[..3], &[7, 6, 4]);
        assert_eq!(cache.cached_len(0), 3);
        assert_eq!(cache.cached_len(1), 2);
        assert_eq!(cache.cached_len(2), 1);
        assert_eq!(cache.cached_bytes(), 128);
    }

    #[test]
    fn length_rule_hits_prefix_only() {
        let (graph, counts) = counted_example();
        let cache = fill_adj_cache(&graph, &counts, 128, 8, 8).unwrap();

        // Node 2 keeps one of its two elements: rank 0 hits, rank 1 misses.
        assert!(cache.lookup(2, 0).unwrap().is_hit());
        assert_eq!(cache.lookup(2, 1).unwrap(), AdjLookup::Miss);
        assert!(cache.lookup(2, 2).is_err());

        // Fully cached node hits at every valid rank.
        for r in 0..3 {
            assert!(cache.lookup(0, r).unwrap().is_hit());
        }
    }

    #[test]
    fn hit_and_miss_paths_agree_on_neighbors() {
        let (graph, counts) = counted_example();
        let cache = fill_adj_cache(&graph, &counts, 128, 8, 8).unwrap();
        for v in 0..graph.num_nodes() {
            for r in 0..graph.degree(v) {
                let host = cache.host_neighbor(v, r);
                if let AdjLookup::Hit { neighbor, value } = cache.lookup(v, r).unwrap() {
                    assert_eq!((neighbor, value), host);
                }
            }
        }
    }

    #[test]
    fn zero_budget_is_empty() {
        let (graph, counts) = counted_example();
        let cache = fill_adj_cache(&graph, &counts, 0, 8, 8).unwrap();
        assert_eq!(cache.cached_elements(), 0);
        assert_eq!(cache.cached_bytes(), 0);
        for v in 0..graph.num_nodes() {
            assert_eq!(cache.cached_len(v), 0);
            for r in 0..graph.degree(v) {
                assert_eq!(cache.lookup(v, r).unwrap(), AdjLookup::Miss);
            }
        }
    }

    #[test]
    fn full_budget_caches_everything_verbatim() {
        let (graph, counts) = counted_example();
        let vol = csc_byte_volume(&graph, 8, 8);
        let cache = fill_adj_cache(&graph, &counts, vol, 8, 8).unwrap();
        assert_eq!(cache.new_col_ptr(), graph.col_ptr());
        assert_eq!(cache.new_row_index(), graph.row_index());
        for v in 0..graph.num_nodes() {
            assert_eq!(cache.cached_len(v), cache.original_len(v));
        }
        assert_eq!(cache.cached_bytes(), vol);
    }

    #[test]
    fn full_budget_preserves_neighbor_multisets() {
        let graph = generate_power_law(200, 6.0, 2.2, 3).unwrap();
        let counts = random_counts(&graph, 11);
        let budget = csc_byte_volume(&graph, 8, 8);
        let cache = fill_adj_cache(&graph, &counts, budget, 8, 8).unwrap();
        for v in 0..graph.num_nodes() {
            let mut original: Vec<NodeId> = graph.in_neighbors(v).to_vec();
            let mut cached: Vec<NodeId> = (0..graph.degree(v))
                .map(|r| match cache.lookup(v, r).unwrap() {
                    AdjLookup::Hit { neighbor, .. } => neighbor,
                    AdjLookup::Miss => panic!("full budget must hit"),
                })
                .collect();
            original.sort_unstable();
            cached.sort_unstable();
            assert_eq!(original, cached);
        }
    }

    #[test]
    fn misaligned_counts_rejected() {
        let (graph, _) = counted_example();
        let bad = AccessCounts {
            edge_counts: vec![1, 2],
            node_visits: vec![0; 8],
        };
        assert!(fill_adj_cache(&graph, &bad, 100, 8, 8).is_err());
    }

    fn random_counts(graph: &CscGraph, seed: u64) -> AccessCounts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        AccessCounts {
            edge_counts: (0..graph.num_edges()).map(|_| rng.random_range(0..50)).collect(),
            node_visits: (0..graph.num_nodes()).map(|_| rng.random_range(0..50)).collect(),
        }
    }

    /// Independent oracle: sort every element by (node total desc, node id
    /// asc, element count desc, position asc) and take the longest prefix
    /// whose cache volume fits the budget.
    fn oracle_admitted(
        graph: &CscGraph,
        counts: &AccessCounts,
        budget: u64,
        ib: u64,
        vb: u64,
    ) -> BTreeSet<usize> {
        if csc_byte_volume(graph, ib, vb) <= budget {
            return (0..graph.num_edges()).collect();
        }
        let mut elems: Vec<(u64, NodeId, u64, usize)> = Vec::new();
        for v in 0..graph.num_nodes() {
            let total = counts.node_total(graph, v);
            for r in 0..graph.degree(v) {
                let e = graph.edge_index(v, r);
                elems.push((total, v, counts.edge_counts[e], e));
            }
        }
        elems.sort_by(|a, b| {
            b.0.cmp(&a.0)
                .then(a.1.cmp(&b.1))
                .then(b.2.cmp(&a.2))
                .then(a.3.cmp(&b.3))
        });

        let mut admitted = BTreeSet::new();
        let mut seen_nodes = BTreeSet::new();
        let mut bytes = 0u64;
        for &(_, v, _, e) in &elems {
            let mut cost = ib + vb;
            if !seen_nodes.contains(&v) {
                cost += ib;
                if seen_nodes.is_empty() {
                    cost += ib;
                }
            }
            if bytes + cost > budget {
                break;
            }
            bytes += cost;
            seen_nodes.insert(v);
            admitted.insert(e);
        }
        admitted
    }

    #[test]
    fn admitted_set_matches_prefix_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..40 {
            let n = rng.random_range(1..60);
            let avg = rng.random_range(1..8) as f64;
            let graph = generate_power_law(n, avg, 2.3, trial).unwrap();
            let counts = random_counts(&graph, trial * 7 + 1);
            let vol = csc_byte_volume(&graph, 8, 8);
            let budget = rng.random_range(0..vol + 32);
            let cache = fill_adj_cache(&graph, &counts, budget, 8, 8).unwrap();
            let got: BTreeSet<usize> = cache.admitted_edge_indices().into_iter().collect();
            let want = oracle_admitted(&graph, &counts, budget, 8, 8);
            assert_eq!(got, want, "trial {trial}, budget {budget}");
            assert!(cache.cached_bytes() <= budget);
        }
    }

    #[test]
    fn partial_fill_orders_are_non_increasing() {
        let graph = generate_power_law(120, 5.0, 2.2, 5).unwrap();
        let counts = random_counts(&graph, 17);
        let vol = csc_byte_volume(&graph, 8, 8);
        let cache = fill_adj_cache(&graph, &counts, vol / 3, 8, 8).unwrap();

        // Node totals are non-increasing across the cache order.
        let totals: Vec<u64> = (0..cache.num_nodes())
            .map(|pos| counts.node_total(&graph, cache.node_at_position(pos)))
            .collect();
        assert!(totals.windows(2).all(|w| w[0] >= w[1]));

        // Per-element counts are non-increasing within every cached run.
        for v in 0..cache.num_nodes() {
            let run: Vec<u64> = (0..cache.cached_len(v))
                .map(|r| {
                    let host_idx = cache.host_col_ptr[cache.node_position(v)] + r;
                    counts.edge_counts[cache.host_perm[host_idx]]
                })
                .collect();
            assert!(run.windows(2).all(|w| w[0] >= w[1]), "node {v}: {run:?}");
        }
    }

    #[test]
    fn hit_rate_edge_cases() {
        assert_eq!(adj_hit_rate(0, 100), 0.0);
        assert_eq!(adj_hit_rate(100, 100), 1.0);
        assert_eq!(adj_hit_rate(37, 100), 0.37);
        assert_eq!(adj_hit_rate(0, 0), 1.0);
    }
}
