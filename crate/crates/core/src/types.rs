//! Points, datasets and queries.
//!
//! Keywords are interned to dense [`KeywordId`] ordinals when a [`Dataset`] is
//! built; the string dictionary lives on the dataset. Points are kept sorted by
//! id so that a point's position equals the rank of its id.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

/// External point identifier, unique within a dataset.
pub type PointId = u64;

/// Dense keyword ordinal assigned at dataset load.
pub type KeywordId = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub id: PointId,
    pub coords: Vec<f64>,
    /// Sorted, deduplicated keyword ordinals.
    pub keywords: Vec<KeywordId>,
}

impl Point {
    pub fn has_keyword(&self, keyword: KeywordId) -> bool {
        self.keywords.binary_search(&keyword).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dimension: usize,
    points: Vec<Point>,
    dictionary: Vec<String>,
    lookup: HashMap<String, KeywordId>,
}

impl Dataset {
    pub fn builder(dimension: usize) -> DatasetBuilder {
        DatasetBuilder {
            dimension,
            records: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points in ascending id order.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, id: PointId) -> Option<&Point> {
        self.rank_of(id).map(|rank| &self.points[rank])
    }

    pub fn rank_of(&self, id: PointId) -> Option<usize> {
        self.points.binary_search_by_key(&id, |p| p.id).ok()
    }

    /// Keyword strings indexed by ordinal.
    pub fn dictionary(&self) -> &[String] {
        &self.dictionary
    }

    pub fn keyword_id(&self, name: &str) -> Option<KeywordId> {
        self.lookup.get(name).copied()
    }

    pub fn keyword_name(&self, id: KeywordId) -> Option<&str> {
        self.dictionary.get(id as usize).map(String::as_str)
    }

    /// Largest keyword count carried by a single point.
    pub fn max_keywords_per_point(&self) -> usize {
        self.points.iter().map(|p| p.keywords.len()).max().unwrap_or(0)
    }

    /// Mean keyword count per point (`t` in the cost formulas).
    pub fn mean_keywords_per_point(&self) -> f64 {
        let total: usize = self.points.iter().map(|p| p.keywords.len()).sum();
        total as f64 / self.points.len() as f64
    }

    /// Rebuild a dataset from already interned parts, e.g. when loading from
    /// disk. Keyword ordinals must index into `dictionary`.
    pub fn from_parts(
        dimension: usize,
        mut points: Vec<Point>,
        dictionary: Vec<String>,
    ) -> Result<Self> {
        points.sort_by_key(|p| p.id);
        let lookup = dictionary
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), i as KeywordId))
            .collect::<HashMap<_, _>>();
        if lookup.len() != dictionary.len() {
            return Err(Error::invalid("duplicate keyword in dictionary"));
        }
        for p in &mut points {
            p.keywords.sort_unstable();
            p.keywords.dedup();
            if p.keywords.iter().any(|&k| k as usize >= dictionary.len()) {
                return Err(Error::invalid(format!(
                    "point {} references an unknown keyword ordinal",
                    p.id
                )));
            }
        }
        let dataset = Dataset {
            dimension,
            points,
            dictionary,
            lookup,
        };
        dataset.validate()?;
        Ok(dataset)
    }

    fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if self.points.is_empty() {
            return Err(Error::invalid("dataset has no points"));
        }
        for pair in self.points.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::invalid(format!("duplicate point id {}", pair[0].id)));
            }
        }
        for p in &self.points {
            if p.coords.len() != self.dimension {
                return Err(Error::invalid(format!(
                    "point {} has {} coordinates, expected {}",
                    p.id,
                    p.coords.len(),
                    self.dimension
                )));
            }
            if p.coords.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid(format!("point {} has a non-finite coordinate", p.id)));
            }
            if p.keywords.is_empty() {
                return Err(Error::invalid(format!("point {} has no keywords", p.id)));
            }
        }
        Ok(())
    }
}

/// Collects raw records and interns keywords in order of first appearance
/// (after sorting records by id).
#[derive(Debug, Clone)]
pub struct DatasetBuilder {
    dimension: usize,
    records: Vec<(PointId, Vec<f64>, Vec<String>)>,
}

impl DatasetBuilder {
    pub fn push<S: AsRef<str>>(&mut self, id: PointId, coords: Vec<f64>, keywords: &[S]) -> &mut Self {
        self.records.push((
            id,
            coords,
            keywords.iter().map(|k| k.as_ref().to_owned()).collect(),
        ));
        self
    }

    pub fn build(mut self) -> Result<Dataset> {
        self.records.sort_by_key(|r| r.0);
        let mut dictionary: Vec<String> = Vec::new();
        let mut lookup: HashMap<String, KeywordId> = HashMap::new();
        let mut points = Vec::with_capacity(self.records.len());
        for (id, coords, names) in self.records {
            let mut keywords = Vec::with_capacity(names.len());
            for name in names {
                if name.is_empty() {
                    return Err(Error::invalid(format!("point {id} has an empty keyword")));
                }
                let next = dictionary.len() as KeywordId;
                let kw = *lookup.entry(name.clone()).or_insert_with(|| {
                    dictionary.push(name);
                    next
                });
                keywords.push(kw);
            }
            keywords.sort_unstable();
            keywords.dedup();
            points.push(Point { id, coords, keywords });
        }
        let dataset = Dataset {
            dimension: self.dimension,
            points,
            dictionary,
            lookup,
        };
        dataset.validate()?;
        Ok(dataset)
    }
}

/// A set of distinct query keywords, in the order the caller supplied them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    keywords: Vec<String>,
}

impl Query {
    /// Largest supported query size; per-point keyword masks are 64-bit.
    pub const MAX_KEYWORDS: usize = 64;

    pub fn new<S: Into<String>>(keywords: impl IntoIterator<Item = S>) -> Result<Self> {
        let keywords: Vec<String> = keywords.into_iter().map(Into::into).collect();
        if keywords.is_empty() {
            return Err(Error::invalid("query needs at least one keyword"));
        }
        if keywords.len() > Self::MAX_KEYWORDS {
            return Err(Error::invalid(format!(
                "query has {} keywords, at most {} supported",
                keywords.len(),
                Self::MAX_KEYWORDS
            )));
        }
        let mut seen = HashSet::new();
        for k in &keywords {
            if k.is_empty() {
                return Err(Error::invalid("empty query keyword"));
            }
            if !seen.insert(k.as_str()) {
                return Err(Error::invalid(format!("duplicate query keyword {k:?}")));
            }
        }
        Ok(Query { keywords })
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }
}
