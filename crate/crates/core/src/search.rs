//! Top-k drivers over a multi-scale index.
//!
//! Both modes walk the scales from the finest bin width upwards. At each
//! scale the buckets holding every query keyword are turned into subsets and
//! searched. The exact driver stops once the k-th diameter fits within half a
//! bin width, which guarantees that every better set already shared a bucket.
//! The approximate driver stops at the first scale that leaves k results.
//! If no scale stops the search, every point carrying a query keyword is
//! searched as one subset.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::index::hashing::is_prime;
use crate::index::{BucketId, Index, IndexSource, Mode};
use crate::queue::{ResultEntry, ResultQueue};
use crate::subset::{search_in_subset, SubsetOptions, SubsetStats, Universe};
use crate::types::{Dataset, KeywordId, PointId, Query};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Skip subsets already searched during this query (exact mode only).
    pub dedupe_subsets: bool,
    /// Seed for the position primes of the subset hash.
    pub dedupe_seed: u64,
    pub subset: SubsetOptions,
    /// Keep the id list of every subset handed to subset search.
    pub record_subsets: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            dedupe_subsets: true,
            dedupe_seed: 0x5eed,
            subset: SubsetOptions::default(),
            record_subsets: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SearchStats {
    pub buckets_scanned: u64,
    pub subsets_explored: u64,
    pub subsets_deduped: u64,
    pub empty_subsets: u64,
    pub scales_visited: usize,
    /// Scale after which the driver stopped; `None` if the fallback ran.
    pub stopped_at: Option<usize>,
    pub fallback: bool,
    pub universe_size: usize,
    pub subset: SubsetStats,
    pub explored: Vec<Vec<PointId>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    /// Best entries first; fewer than k when fewer candidates exist.
    Found(Vec<ResultEntry>),
    /// Some query keyword appears on no point.
    Unsatisfiable,
}

impl SearchOutcome {
    pub fn entries(&self) -> &[ResultEntry] {
        match self {
            SearchOutcome::Found(e) => e,
            SearchOutcome::Unsatisfiable => &[],
        }
    }

    pub fn is_unsatisfiable(&self) -> bool {
        matches!(self, SearchOutcome::Unsatisfiable)
    }

    pub fn diameters(&self) -> Vec<f64> {
        self.entries().iter().map(ResultEntry::diameter).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub stats: SearchStats,
}

/// Search an in-memory index in the requested mode.
pub fn search(index: &Index, dataset: &Dataset, query: &Query, k: usize, mode: Mode) -> Result<SearchOutcome> {
    if index.mode() != mode {
        return Err(Error::invalid(format!(
            "index was built in {} mode, {} requested",
            index.mode(),
            mode
        )));
    }
    Ok(search_source(&index.source(dataset), query, k, &SearchOptions::default())?.outcome)
}

/// Bucket ids present in the keyword-bucket list of every keyword, ascending.
pub fn candidate_buckets<S: IndexSource + ?Sized>(
    source: &S,
    scale: usize,
    keywords: &[KeywordId],
) -> Result<Vec<BucketId>> {
    let mut all: Vec<BucketId> = Vec::new();
    for &kw in keywords {
        all.extend_from_slice(&source.keyword_buckets(scale, kw)?);
    }
    all.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j] == all[i] {
            j += 1;
        }
        if j - i == keywords.len() {
            out.push(all[i]);
        }
        i = j;
    }
    Ok(out)
}

/// Remembers every subset searched during one query. Each subset is keyed by
/// two sums of `id · prime`, with primes picked by position from two
/// shuffled sequences; key hits are confirmed element by element.
#[derive(Debug, Clone)]
pub struct SubsetDeduper {
    primes_a: Vec<u64>,
    primes_b: Vec<u64>,
    table: HashMap<(u64, u64), Vec<Vec<PointId>>>,
    key_collisions: u64,
}

impl SubsetDeduper {
    pub fn new(seed: u64) -> Self {
        let mut pool: Vec<u64> = (1_009u64..).filter(|&n| is_prime(n)).take(512).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pool.shuffle(&mut rng);
        let primes_b = pool.split_off(256);
        SubsetDeduper::with_primes(pool, primes_b)
    }

    pub fn with_primes(primes_a: Vec<u64>, primes_b: Vec<u64>) -> Self {
        assert!(!primes_a.is_empty() && !primes_b.is_empty());
        SubsetDeduper {
            primes_a,
            primes_b,
            table: HashMap::new(),
            key_collisions: 0,
        }
    }

    pub fn key(&self, ids: &[PointId]) -> (u64, u64) {
        let mut a = 0u64;
        let mut b = 0u64;
        for (pos, &id) in ids.iter().enumerate() {
            a = a.wrapping_add(id.wrapping_mul(self.primes_a[pos % self.primes_a.len()]));
            b = b.wrapping_add(id.wrapping_mul(self.primes_b[pos % self.primes_b.len()]));
        }
        (a, b)
    }

    /// Record `ids` (ascending). Returns false if it was seen before.
    pub fn insert(&mut self, ids: &[PointId]) -> bool {
        let key = self.key(ids);
        let slot = self.table.entry(key).or_default();
        if slot.iter().any(|s| s.as_slice() == ids) {
            return false;
        }
        if !slot.is_empty() {
            self.key_collisions += 1;
        }
        slot.push(ids.to_vec());
        true
    }

    /// Distinct subsets that shared a key with an earlier one.
    pub fn key_collisions(&self) -> u64 {
        self.key_collisions
    }

    pub fn len(&self) -> usize {
        self.table.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extracted {
    Subset(Vec<usize>),
    Empty,
    Duplicate,
}

/// Restrict bucket contents (ascending ids) to the query universe and drop
/// subsets already searched.
pub fn extract_subset(
    bucket: &[PointId],
    universe: &Universe,
    deduper: Option<&mut SubsetDeduper>,
) -> Extracted {
    let subset: Vec<usize> = bucket.iter().filter_map(|&id| universe.local_of(id)).collect();
    if subset.is_empty() {
        return Extracted::Empty;
    }
    if let Some(d) = deduper {
        let ids: Vec<PointId> = subset.iter().map(|&l| universe.id(l)).collect();
        if !d.insert(&ids) {
            return Extracted::Duplicate;
        }
    }
    Extracted::Subset(subset)
}

/// Run a query against any index source, in the source's mode.
pub fn search_source<S: IndexSource + ?Sized>(
    source: &S,
    query: &Query,
    k: usize,
    options: &SearchOptions,
) -> Result<SearchReport> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut stats = SearchStats::default();
    let mut keywords = Vec::with_capacity(query.len());
    for name in query.keywords() {
        match source.keyword_id(name) {
            Some(id) => keywords.push(id),
            None => {
                return Ok(SearchReport {
                    outcome: SearchOutcome::Unsatisfiable,
                    stats,
                })
            }
        }
    }

    let mut member_ids: Vec<PointId> = Vec::new();
    for &kw in &keywords {
        let list = source.keyword_points(kw)?;
        if list.is_empty() {
            return Ok(SearchReport {
                outcome: SearchOutcome::Unsatisfiable,
                stats,
            });
        }
        member_ids.extend_from_slice(&list);
    }
    member_ids.sort_unstable();
    member_ids.dedup();
    let universe = Universe::new(source.fetch_points(&member_ids)?, &keywords)?;
    stats.universe_size = universe.len();

    let mode = source.mode();
    let mut queue = match mode {
        Mode::Exact => ResultQueue::with_sentinels(k),
        Mode::Approximate => ResultQueue::new(k),
    };
    let mut deduper = (mode == Mode::Exact && options.dedupe_subsets)
        .then(|| SubsetDeduper::new(options.dedupe_seed));
    let w0 = source.initial_width();

    let run = |subset: Vec<usize>, queue: &mut ResultQueue, stats: &mut SearchStats| {
        stats.subsets_explored += 1;
        if options.record_subsets {
            stats.explored.push(subset.iter().map(|&l| universe.id(l)).collect());
        }
        search_in_subset(&universe, &subset, queue, &options.subset, &mut stats.subset);
    };

    for s in 0..source.scale_count() {
        stats.scales_visited = s + 1;
        for b in candidate_buckets(source, s, &keywords)? {
            stats.buckets_scanned += 1;
            let points = source.bucket_points(s, b)?;
            match extract_subset(&points, &universe, deduper.as_mut()) {
                Extracted::Subset(subset) => run(subset, &mut queue, &mut stats),
                Extracted::Empty => stats.empty_subsets += 1,
                Extracted::Duplicate => stats.subsets_deduped += 1,
            }
        }
        let done = match mode {
            Mode::Exact => queue.kth_diameter() <= w0 * 2f64.powi(s as i32 - 1),
            Mode::Approximate => queue.is_full(),
        };
        if done {
            stats.stopped_at = Some(s);
            return Ok(SearchReport {
                outcome: SearchOutcome::Found(queue.into_entries()),
                stats,
            });
        }
    }

    stats.fallback = true;
    let all: Vec<usize> = (0..universe.len()).collect();
    let ids = universe.ids().to_vec();
    let fresh = deduper.as_mut().is_none_or(|d| d.insert(&ids));
    if fresh {
        run(all, &mut queue, &mut stats);
    } else {
        stats.subsets_deduped += 1;
    }
    Ok(SearchReport {
        outcome: SearchOutcome::Found(queue.into_entries()),
        stats,
    })
}
