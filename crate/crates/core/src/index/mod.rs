//! Multi-scale projection index.
//!
//! An [`Index`] holds a keyword → point inverted list and one [`HashLevel`]
//! per scale. Every level hashes all points into a fixed-size table using
//! the same random unit vectors; only the bin width `w0 · 2^s` changes from
//! level to level. Each level also keeps a keyword → bucket inverted list so
//! a query can find the buckets that contain all of its keywords.

pub mod hashing;
pub mod projection;
mod source;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::types::{Dataset, KeywordId, PointId};

pub use hashing::{bucket_id, default_primes, hash_keys, signatures, BinKeys, BucketId};
pub use projection::{sample_unit_vectors, ProjectionBasis};
pub use source::{lookup, IndexSource, LookupKind, MemorySource};

/// Exact search uses overlapping bins (2^m signatures per point);
/// approximate search uses disjoint bins (one signature per point).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Approximate,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Approximate => "approx",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "approx" | "approximate" => Ok(Mode::Approximate),
            other => Err(Error::invalid(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexConfig {
    /// Number of random unit vectors (`m`).
    pub vectors: usize,
    /// Number of scales (`L`).
    pub scales: usize,
    /// Initial bin width `w0`; derived as `pMax / 2^L` when unset.
    pub initial_width: Option<f64>,
    /// Hash table bucket count (`M`).
    pub table_size: usize,
    pub seed: u64,
    pub mode: Mode,
    /// One odd prime per vector, used to fold a signature into a bucket id.
    pub primes: Vec<u64>,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            vectors: 2,
            scales: 5,
            initial_width: None,
            table_size: 10_000,
            seed: 0,
            mode: Mode::Exact,
            primes: default_primes(2),
        }
    }
}

impl IndexConfig {
    pub fn new(mode: Mode) -> Self {
        IndexConfig {
            mode,
            ..IndexConfig::default()
        }
    }

    /// Set `m` and reset the primes to the matching default list.
    pub fn with_vectors(mut self, vectors: usize) -> Self {
        self.vectors = vectors;
        self.primes = default_primes(vectors);
        self
    }

    pub fn with_scales(mut self, scales: usize) -> Self {
        self.scales = scales;
        self
    }

    pub fn with_initial_width(mut self, width: f64) -> Self {
        self.initial_width = Some(width);
        self
    }

    pub fn with_table_size(mut self, size: usize) -> Self {
        self.table_size = size;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_primes(mut self, primes: Vec<u64>) -> Self {
        self.primes = primes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.vectors == 0 {
            return Err(Error::invalid("need at least one projection vector"));
        }
        if self.scales == 0 {
            return Err(Error::invalid("need at least one scale"));
        }
        if self.scales > 60 {
            return Err(Error::invalid("too many scales"));
        }
        if self.table_size == 0 {
            return Err(Error::invalid("table size must be at least 1"));
        }
        if let Some(w) = self.initial_width {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invalid("initial bin width must be positive and finite"));
            }
        }
        if self.primes.len() < self.vectors {
            return Err(Error::invalid(format!(
                "need {} primes, got {}",
                self.vectors,
                self.primes.len()
            )));
        }
        let mut sorted = self.primes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.primes.len() {
            return Err(Error::invalid("primes must be pairwise distinct"));
        }
        Ok(())
    }
}

/// `L = ⌈log2(pMax / w0)⌉`, at least 1.
pub fn scale_count(max_span: f64, initial_width: f64) -> usize {
    if max_span <= initial_width {
        return 1;
    }
    (max_span / initial_width).log2().ceil() as usize
}

/// `w0 = pMax / 2^L`, falling back to 1 when every projection coincides.
pub fn derived_initial_width(max_span: f64, scales: usize) -> f64 {
    let w = max_span / 2f64.powi(scales as i32);
    if w > 0.0 {
        w
    } else {
        1.0
    }
}

/// One hashtable plus its keyword → bucket inverted list.
#[derive(Debug, Clone, PartialEq)]
pub struct HashLevel {
    scale: usize,
    bin_width: f64,
    buckets: Vec<Vec<PointId>>,
    keyword_buckets: Vec<Vec<BucketId>>,
    hash_constants: Vec<i64>,
    placements: u64,
}

impl HashLevel {
    pub fn from_parts(
        scale: usize,
        bin_width: f64,
        buckets: Vec<Vec<PointId>>,
        keyword_buckets: Vec<Vec<BucketId>>,
        hash_constants: Vec<i64>,
        placements: u64,
    ) -> Self {
        HashLevel {
            scale,
            bin_width,
            buckets,
            keyword_buckets,
            hash_constants,
            placements,
        }
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn table_size(&self) -> usize {
        self.buckets.len()
    }

    /// Point ids in bucket `id`, ascending; empty for unused or out-of-range ids.
    pub fn bucket(&self, id: BucketId) -> &[PointId] {
        self.buckets.get(id as usize).map_or(&[], Vec::as_slice)
    }

    /// Non-empty buckets in ascending id order.
    pub fn occupied_buckets(&self) -> impl Iterator<Item = (BucketId, &[PointId])> {
        self.buckets
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.is_empty())
            .map(|(i, b)| (i as BucketId, b.as_slice()))
    }

    pub fn keyword_buckets(&self, keyword: KeywordId) -> &[BucketId] {
        self.keyword_buckets
            .get(keyword as usize)
            .map_or(&[], Vec::as_slice)
    }

    /// Per-vector constant separating the two key families (exact mode only).
    pub fn hash_constants(&self) -> &[i64] {
        &self.hash_constants
    }

    /// Number of (point, signature) pairs hashed into this level.
    pub fn placements(&self) -> u64 {
        self.placements
    }

    /// Sum of bucket lengths; smaller than `placements` when signatures of
    /// one point collide in the same bucket.
    pub fn stored_ids(&self) -> usize {
        self.buckets.iter().map(Vec::len).sum()
    }

    /// Hash a dataset at one bin width. `projections` holds `m` values per
    /// point, in dataset order.
    pub(crate) fn build(
        dataset: &Dataset,
        projections: &[f64],
        vectors: usize,
        scale: usize,
        bin_width: f64,
        config: &IndexConfig,
    ) -> Self {
        let mode = config.mode;
        let hash_constants = match mode {
            Mode::Exact => (0..vectors)
                .map(|i| {
                    let (lo, hi) = projections
                        .iter()
                        .skip(i)
                        .step_by(vectors)
                        .map(|&p| hashing::primary_key(p, bin_width))
                        .fold((i64::MAX, i64::MIN), |(lo, hi), h| (lo.min(h), hi.max(h)));
                    hi - lo + 2
                })
                .collect(),
            Mode::Approximate => Vec::new(),
        };

        let mut buckets: Vec<Vec<PointId>> = vec![Vec::new(); config.table_size];
        let mut placements = 0u64;
        for (p, proj) in dataset.points().iter().zip(projections.chunks_exact(vectors)) {
            let (ids, signatures) = hashing::point_placements(
                proj,
                bin_width,
                &hash_constants,
                mode,
                &config.primes,
                config.table_size,
            );
            placements += signatures as u64;
            // Points arrive in ascending id order, so buckets stay sorted.
            for b in ids {
                buckets[b as usize].push(p.id);
            }
        }

        let mut keyword_buckets: Vec<Vec<BucketId>> = vec![Vec::new(); dataset.dictionary().len()];
        let mut seen: Vec<u32> = vec![u32::MAX; dataset.dictionary().len()];
        for (b, ids) in buckets.iter().enumerate() {
            for &id in ids {
                let point = &dataset.points()[dataset.rank_of(id).expect("bucket id from dataset")];
                for &kw in &point.keywords {
                    if seen[kw as usize] != b as u32 {
                        seen[kw as usize] = b as u32;
                        keyword_buckets[kw as usize].push(b as BucketId);
                    }
                }
            }
        }

        HashLevel {
            scale,
            bin_width,
            buckets,
            keyword_buckets,
            hash_constants,
            placements,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Index {
    config: IndexConfig,
    basis: ProjectionBasis,
    initial_width: f64,
    keyword_points: Vec<Vec<PointId>>,
    levels: Vec<HashLevel>,
}

impl Index {
    pub fn build(dataset: &Dataset, config: IndexConfig) -> Result<Self> {
        config.validate()?;
        if dataset.is_empty() {
            return Err(Error::invalid("cannot index an empty dataset"));
        }
        let basis = ProjectionBasis::fit(dataset, config.vectors, config.seed)?;
        let initial_width = config
            .initial_width
            .unwrap_or_else(|| derived_initial_width(basis.max_span(), config.scales));

        let mut keyword_points: Vec<Vec<PointId>> = vec![Vec::new(); dataset.dictionary().len()];
        for p in dataset.points() {
            for &kw in &p.keywords {
                keyword_points[kw as usize].push(p.id);
            }
        }

        let m = config.vectors;
        let mut projections = Vec::with_capacity(dataset.len() * m);
        for p in dataset.points() {
            projections.extend(basis.project(&p.coords));
        }

        let levels = (0..config.scales)
            .map(|s| {
                let width = initial_width * 2f64.powi(s as i32);
                HashLevel::build(dataset, &projections, m, s, width, &config)
            })
            .collect();

        Ok(Index {
            config,
            basis,
            initial_width,
            keyword_points,
            levels,
        })
    }

    /// Reassemble an index from stored parts.
    pub fn from_parts(
        config: IndexConfig,
        basis: ProjectionBasis,
        initial_width: f64,
        keyword_points: Vec<Vec<PointId>>,
        levels: Vec<HashLevel>,
    ) -> Result<Self> {
        config.validate()?;
        if levels.len() != config.scales {
            return Err(Error::invalid("level count does not match configured scales"));
        }
        Ok(Index {
            config,
            basis,
            initial_width,
            keyword_points,
            levels,
        })
    }

    pub fn config(&self) -> &IndexConfig {
        &self.config
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    pub fn basis(&self) -> &ProjectionBasis {
        &self.basis
    }

    /// The resolved `w0`.
    pub fn initial_width(&self) -> f64 {
        self.initial_width
    }

    pub fn levels(&self) -> &[HashLevel] {
        &self.levels
    }

    pub fn level(&self, scale: usize) -> Result<&HashLevel> {
        self.levels.get(scale).ok_or_else(|| {
            Error::invalid(format!(
                "scale {scale} out of range (index has {} scales)",
                self.levels.len()
            ))
        })
    }

    pub fn keyword_points(&self, keyword: KeywordId) -> &[PointId] {
        self.keyword_points
            .get(keyword as usize)
            .map_or(&[], Vec::as_slice)
    }

    pub fn keyword_count(&self) -> usize {
        self.keyword_points.len()
    }

    pub fn source<'a>(&'a self, dataset: &'a Dataset) -> MemorySource<'a> {
        MemorySource::new(self, dataset)
    }
}
