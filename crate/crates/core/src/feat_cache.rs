//! Static node-feature cache.
//!
//! Filling follows a no-sort hot-set policy: every node whose pre-sampling
//! visit count exceeds the average is admitted first (ascending node id, no
//! sorting among them), and if capacity remains the below-average nodes are
//! backfilled by descending visit count. Lookup is a constant-time associative
//! map from node id to cache slot.

use alloc::vec::Vec;
use core::cmp::Reverse;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Immutable feature-row cache; safe for concurrent lookups after fill.
#[derive(Debug, Clone)]
pub struct FeatCache {
    slot_of: HashMap<NodeId, usize>,
    capacity_slots: usize,
    admitted: Vec<NodeId>,
    avg_visits: f64,
}

/// Result of a feature-cache lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatLookup {
    Hit { slot: usize },
    Miss,
}

impl FeatLookup {
    pub fn is_hit(&self) -> bool {
        matches!(self, FeatLookup::Hit { .. })
    }
}

/// Fills the feature cache from per-node visit counts.
///
/// Capacity is `floor(budget / feat_row_bytes)` rows. Nodes with visits
/// strictly greater than the arithmetic mean (taken over all nodes, including
/// unvisited ones) are admitted in ascending id order; remaining capacity is
/// backfilled with the other nodes by descending visit count, ties by
/// ascending id. Both orders are deterministic, which makes admitted sets
/// monotone in the budget.
pub fn fill_feat_cache(visits: &[u64], budget: u64, feat_row_bytes: u64) -> Result<FeatCache> {
    if feat_row_bytes == 0 {
        return Err(Error::InvalidArgument(
            "feat_row_bytes must be positive".into(),
        ));
    }
    let capacity_slots = (budget / feat_row_bytes) as usize;
    let n = visits.len();
    let avg_visits = if n == 0 {
        0.0
    } else {
        visits.iter().sum::<u64>() as f64 / n as f64
    };

    let mut admitted: Vec<NodeId> = Vec::new();
    for (node, &v) in visits.iter().enumerate() {
        if admitted.len() == capacity_slots {
            break;
        }
        if v as f64 > avg_visits {
            admitted.push(node);
        }
    }
    if admitted.len() < capacity_slots {
        let mut rest: Vec<NodeId> = (0..n)
            .filter(|&v| !(visits[v] as f64 > avg_visits))
            .collect();
        rest.sort_unstable_by_key(|&v| (Reverse(visits[v]), v));
        for node in rest {
            if admitted.len() == capacity_slots {
                break;
            }
            admitted.push(node);
        }
    }

    let slot_of = admitted
        .iter()
        .enumerate()
        .map(|(slot, &node)| (node, slot))
        .collect();

    Ok(FeatCache {
        slot_of,
        capacity_slots,
        admitted,
        avg_visits,
    })
}

impl FeatCache {
    /// An empty cache with no capacity; every lookup misses.
    pub fn empty() -> Self {
        FeatCache {
            slot_of: HashMap::new(),
            capacity_slots: 0,
            admitted: Vec::new(),
            avg_visits: 0.0,
        }
    }

    /// Builds a cache holding exactly `admitted` (used by the knapsack
    /// baseline, which selects rows globally rather than by the hot-set
    /// policy).
    pub fn from_admitted(admitted: Vec<NodeId>, capacity_slots: usize, avg_visits: f64) -> Self {
        debug_assert!(admitted.len() <= capacity_slots);
        let slot_of = admitted
            .iter()
            .enumerate()
            .map(|(slot, &node)| (node, slot))
            .collect();
        FeatCache {
            slot_of,
            capacity_slots,
            admitted,
            avg_visits,
        }
    }

    pub fn lookup(&self, node: NodeId) -> FeatLookup {
        match self.slot_of.get(&node) {
            Some(&slot) => FeatLookup::Hit { slot },
            None => FeatLookup::Miss,
        }
    }

    pub fn admitted(&self) -> &[NodeId] {
        &self.admitted
    }

    pub fn len(&self) -> usize {
        self.admitted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.admitted.is_empty()
    }

    pub fn capacity_slots(&self) -> usize {
        self.capacity_slots
    }

    /// Mean visit count used as the admission threshold.
    pub fn avg_visits(&self) -> f64 {
        self.avg_visits
    }

    /// Bytes resident in the cache.
    pub fn used_bytes(&self, feat_row_bytes: u64) -> u64 {
        self.admitted.len() as u64 * feat_row_bytes
    }
}
