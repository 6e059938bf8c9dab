use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Dataset, KeywordId, Point, Query};

/// Uniform random points, each tagged with `tags` distinct keywords drawn
/// uniformly from `k0 .. k{dictionary-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub size: usize,
    pub dimension: usize,
    pub dictionary: usize,
    pub tags: usize,
    #[serde(default = "default_range")]
    pub range: (f64, f64),
    #[serde(default)]
    pub seed: u64,
}

fn default_range() -> (f64, f64) {
    (0.0, 10_000.0)
}

impl SyntheticSpec {
    pub fn new(size: usize, dimension: usize, dictionary: usize, tags: usize, seed: u64) -> Self {
        SyntheticSpec {
            size,
            dimension,
            dictionary,
            tags,
            range: default_range(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 || self.dimension == 0 || self.dictionary == 0 || self.tags == 0 {
            return Err(Error::invalid("size, dimension, dictionary and tags must be at least 1"));
        }
        if self.tags > self.dictionary {
            return Err(Error::invalid(format!(
                "cannot draw {} distinct tags from {} keywords",
                self.tags, self.dictionary
            )));
        }
        if !(self.range.0 < self.range.1) || !self.range.0.is_finite() || !self.range.1.is_finite() {
            return Err(Error::invalid("coordinate range must be finite and non-empty"));
        }
        Ok(())
    }
}

/// Point ids run from 0 to `size - 1`. Keywords that no point received are
/// left out of the dictionary.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = spec.range;
    let mut used = vec![false; spec.dictionary];
    let mut points = Vec::with_capacity(spec.size);
    for id in 0..spec.size as u64 {
        let coords: Vec<f64> = (0..spec.dimension).map(|_| rng.random_range(lo..=hi)).collect();
        let mut keywords: Vec<KeywordId> = sample(&mut rng, spec.dictionary, spec.tags)
            .into_iter()
            .map(|k| k as KeywordId)
            .collect();
        keywords.sort_unstable();
        for &k in &keywords {
            used[k as usize] = true;
        }
        points.push(Point { id, coords, keywords });
    }
    let mut remap = vec![KeywordId::MAX; spec.dictionary];
    let mut dictionary = Vec::new();
    for (k, &u) in used.iter().enumerate() {
        if u {
            remap[k] = dictionary.len() as KeywordId;
            dictionary.push(format!("k{k}"));
        }
    }
    for p in &mut points {
        for k in &mut p.keywords {
            *k = remap[*k as usize];
        }
    }
    Dataset::from_parts(spec.dimension, points, dictionary)
}

/// `count` queries of `q` distinct keywords sampled from the dictionary.
pub fn gen_queries(dataset: &Dataset, q: usize, count: usize, seed: u64) -> Result<Vec<Query>> {
    let u = dataset.dictionary().len();
    if q == 0 || q > u {
        return Err(Error::invalid(format!("query size {q} must be in 1..={u}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            Query::new(
                sample(&mut rng, u, q)
                    .into_iter()
                    .map(|i| dataset.dictionary()[i].clone()),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let spec = SyntheticSpec::new(10, 2, 5, 1, 3);
        let a = gen_synthetic(&spec).unwrap();
        assert_eq!(a, gen_synthetic(&spec).unwrap());
        for p in a.points() {
            assert!(p.coords.iter().all(|&c| (0.0..=10_000.0).contains(&c)));
            assert_eq!(p.keywords.len(), 1);
        }
    }

    #[test]
    fn too_many_tags() {
        assert!(gen_synthetic(&SyntheticSpec::new(10, 2, 3, 4, 0)).is_err());
    }

    #[test]
    fn keyword_counts_are_binomial() {
        let (n, u) = (100_000usize, 1000usize);
        let ds = gen_synthetic(&SyntheticSpec::new(n, 1, u, 1, 11)).unwrap();
        let mut counts = vec![0usize; ds.dictionary().len()];
        for p in ds.points() {
            counts[p.keywords[0] as usize] += 1;
        }
        let mean = n as f64 / u as f64;
        let sd = (n as f64 * (1.0 / u as f64) * (1.0 - 1.0 / u as f64)).sqrt();
        let inside = counts
            .iter()
            .filter(|&&c| (c as f64 - mean).abs() <= 3.0 * sd)
            .count();
        // Keywords never drawn are absent from the dictionary; count them as outliers.
        assert!(inside as f64 >= 0.99 * u as f64, "{inside}");
    }

    #[test]
    fn query_generation() {
        let ds = gen_synthetic(&SyntheticSpec::new(200, 2, 6, 2, 1)).unwrap();
        let all = gen_queries(&ds, 6, 5, 2).unwrap();
        for q in &all {
            let mut kws = q.keywords().to_vec();
            kws.sort();
            let mut dict = ds.dictionary().to_vec();
            dict.sort();
            assert_eq!(kws, dict);
        }
        let qs = gen_queries(&ds, 3, 50, 9).unwrap();
        assert_eq!(qs, gen_queries(&ds, 3, 50, 9).unwrap());
        for q in &qs {
            let mut kws = q.keywords().to_vec();
            kws.sort();
            kws.dedup();
            assert_eq!(kws.len(), 3);
        }
        assert!(gen_queries(&ds, 7, 1, 0).is_err());
    }
}
