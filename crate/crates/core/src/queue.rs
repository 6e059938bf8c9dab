//! Bounded top-k result queue.
//!
//! Entries are ranked by diameter, then by set size, then by the sorted id
//! lists compared lexicographically, which makes the ranking a total order.

use std::cmp::Ordering;
use std::fmt;

use crate::types::PointId;

/// A candidate point set together with its diameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultEntry {
    ids: Vec<PointId>,
    diameter: f64,
}

impl ResultEntry {
    /// `ids` are sorted and deduplicated on construction.
    pub fn new(mut ids: Vec<PointId>, diameter: f64) -> Self {
        ids.sort_unstable();
        ids.dedup();
        ResultEntry { ids, diameter }
    }

    pub fn ids(&self) -> &[PointId] {
        &self.ids
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        self.diameter
            .total_cmp(&other.diameter)
            .then(self.ids.len().cmp(&other.ids.len()))
            .then_with(|| self.ids.cmp(&other.ids))
    }
}

impl fmt::Display for ResultEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, id) in self.ids.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}} r={}", self.diameter)
    }
}

/// Top-k queue. In padded mode the queue conceptually starts with `k`
/// sentinel entries of infinite diameter; those never surface in
/// [`entries`](Self::entries) but count towards [`slots`](Self::slots).
#[derive(Debug, Clone, PartialEq)]
pub struct ResultQueue {
    capacity: usize,
    padded: bool,
    entries: Vec<ResultEntry>,
}

impl ResultQueue {
    /// Empty queue: the k-th diameter stays infinite until `k` entries exist.
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "queue capacity must be at least 1");
        ResultQueue {
            capacity: k,
            padded: false,
            entries: Vec::with_capacity(k + 1),
        }
    }

    /// Queue pre-filled with `k` sentinel entries `(∅, +∞)`.
    pub fn with_sentinels(k: usize) -> Self {
        ResultQueue {
            padded: true,
            ..ResultQueue::new(k)
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.capacity
    }

    /// Real (non-sentinel) entries, best first.
    pub fn entries(&self) -> &[ResultEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ResultEntry> {
        self.entries
    }

    /// All `k` slots including sentinels, if the queue is padded.
    pub fn slots(&self) -> Vec<ResultEntry> {
        let mut out = self.entries.clone();
        if self.padded {
            while out.len() < self.capacity {
                out.push(ResultEntry {
                    ids: Vec::new(),
                    diameter: f64::INFINITY,
                });
            }
        }
        out
    }

    /// Diameter of the k-th entry, `+∞` while fewer than `k` entries exist.
    pub fn kth_diameter(&self) -> f64 {
        self.entries
            .get(self.capacity - 1)
            .map_or(f64::INFINITY, |e| e.diameter)
    }

    pub fn contains(&self, ids: &[PointId]) -> bool {
        self.entries.iter().any(|e| e.ids == ids)
    }

    /// Insert `entry` if it outranks the current k-th entry and its id set is
    /// not already queued. Returns whether the queue changed.
    pub fn insert(&mut self, entry: ResultEntry) -> bool {
        if self.is_full() && entry.rank_cmp(&self.entries[self.capacity - 1]) != Ordering::Less {
            return false;
        }
        if self.contains(&entry.ids) {
            return false;
        }
        let pos = self
            .entries
            .partition_point(|e| e.rank_cmp(&entry) == Ordering::Less);
        self.entries.insert(pos, entry);
        self.entries.truncate(self.capacity);
        true
    }
}
