use std::borrow::Cow;

use super::{BucketId, Index, Mode};
use crate::error::{Error, Result};
use crate::types::{Dataset, KeywordId, Point, PointId};

/// Read access to a built index and its points, shared by the in-memory
/// index and the on-disk layout.
pub trait IndexSource {
    fn mode(&self) -> Mode;
    fn scale_count(&self) -> usize;
    fn initial_width(&self) -> f64;
    fn dimension(&self) -> usize;
    fn keyword_id(&self, name: &str) -> Option<KeywordId>;
    fn keyword_points(&self, keyword: KeywordId) -> Result<Cow<'_, [PointId]>>;
    fn keyword_buckets(&self, scale: usize, keyword: KeywordId) -> Result<Cow<'_, [BucketId]>>;
    fn bucket_points(&self, scale: usize, bucket: BucketId) -> Result<Cow<'_, [PointId]>>;
    /// Point records for ascending `ids`, in the same order.
    fn fetch_points(&self, ids: &[PointId]) -> Result<Vec<Point>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LookupKind {
    KeywordPoints,
    KeywordBuckets(usize),
}

/// Sorted id list for `keyword`; empty when the keyword is not indexed.
pub fn lookup<S: IndexSource + ?Sized>(
    source: &S,
    kind: LookupKind,
    keyword: &str,
) -> Result<Vec<u64>> {
    if let LookupKind::KeywordBuckets(s) = kind {
        if s >= source.scale_count() {
            return Err(Error::invalid(format!(
                "scale {s} out of range (index has {} scales)",
                source.scale_count()
            )));
        }
    }
    let Some(kw) = source.keyword_id(keyword) else {
        return Ok(Vec::new());
    };
    Ok(match kind {
        LookupKind::KeywordPoints => source.keyword_points(kw)?.into_owned(),
        LookupKind::KeywordBuckets(s) => source.keyword_buckets(s, kw)?.into_owned(),
    })
}

/// An [`Index`] paired with the dataset it was built from.
#[derive(Debug, Clone, Copy)]
pub struct MemorySource<'a> {
    index: &'a Index,
    dataset: &'a Dataset,
}

impl<'a> MemorySource<'a> {
    pub fn new(index: &'a Index, dataset: &'a Dataset) -> Self {
        MemorySource { index, dataset }
    }

    pub fn index(&self) -> &'a Index {
        self.index
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }
}

impl IndexSource for MemorySource<'_> {
    fn mode(&self) -> Mode {
        self.index.mode()
    }

    fn scale_count(&self) -> usize {
        self.index.levels().len()
    }

    fn initial_width(&self) -> f64 {
        self.index.initial_width()
    }

    fn dimension(&self) -> usize {
        self.dataset.dimension()
    }

    fn keyword_id(&self, name: &str) -> Option<KeywordId> {
        self.dataset.keyword_id(name)
    }

    fn keyword_points(&self, keyword: KeywordId) -> Result<Cow<'_, [PointId]>> {
        Ok(Cow::Borrowed(self.index.keyword_points(keyword)))
    }

    fn keyword_buckets(&self, scale: usize, keyword: KeywordId) -> Result<Cow<'_, [BucketId]>> {
        Ok(Cow::Borrowed(self.index.level(scale)?.keyword_buckets(keyword)))
    }

    fn bucket_points(&self, scale: usize, bucket: BucketId) -> Result<Cow<'_, [PointId]>> {
        Ok(Cow::Borrowed(self.index.level(scale)?.bucket(bucket)))
    }

    fn fetch_points(&self, ids: &[PointId]) -> Result<Vec<Point>> {
        ids.iter()
            .map(|&id| {
                self.dataset
                    .point(id)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("unknown point id {id}")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::IndexConfig;

    #[test]
    fn absent_keyword_is_empty() {
        let mut b = Dataset::builder(1);
        b.push(1, vec![0.0], &["a"]);
        b.push(2, vec![1.0], &["a"]);
        b.push(3, vec![4.0], &["b"]);
        let ds = b.build().unwrap();
        let idx = Index::build(&ds, IndexConfig::default()).unwrap();
        let src = idx.source(&ds);
        assert_eq!(lookup(&src, LookupKind::KeywordPoints, "a").unwrap(), vec![1, 2]);
        assert!(lookup(&src, LookupKind::KeywordPoints, "zz").unwrap().is_empty());
        assert!(lookup(&src, LookupKind::KeywordBuckets(0), "zz").unwrap().is_empty());
        assert!(lookup(&src, LookupKind::KeywordBuckets(9), "a").is_err());
    }
}
