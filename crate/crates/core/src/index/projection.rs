use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::dot;
use crate::types::Dataset;

/// Random unit vectors shared by every scale of an index, plus the largest
/// projection span they produce over the indexed data.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionBasis {
    vectors: Vec<Vec<f64>>,
    max_span: f64,
}

impl ProjectionBasis {
    pub fn new(vectors: Vec<Vec<f64>>, max_span: f64) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::invalid("projection basis needs at least one vector"));
        }
        let dim = vectors[0].len();
        if dim == 0 || vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::invalid("projection vectors must share a nonzero dimension"));
        }
        if !(max_span >= 0.0) {
            return Err(Error::invalid("projection span must be nonnegative"));
        }
        Ok(ProjectionBasis { vectors, max_span })
    }

    /// Sample the basis and measure its span over `dataset`.
    pub fn fit(dataset: &Dataset, count: usize, seed: u64) -> Result<Self> {
        let vectors = sample_unit_vectors(dataset.dimension(), count, seed)?;
        let max_span = vectors
            .iter()
            .map(|z| {
                let (lo, hi) = dataset.points().iter().fold(
                    (f64::INFINITY, f64::NEG_INFINITY),
                    |(lo, hi), p| {
                        let v = dot(z, &p.coords);
                        (lo.min(v), hi.max(v))
                    },
                );
                hi - lo
            })
            .fold(0.0f64, f64::max);
        Ok(ProjectionBasis { vectors, max_span })
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// `pMax`: the largest (max − min) projection over all vectors.
    pub fn max_span(&self) -> f64 {
        self.max_span
    }

    pub fn dimension(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn project(&self, coords: &[f64]) -> Vec<f64> {
        self.vectors.iter().map(|z| dot(z, coords)).collect()
    }
}

/// `count` i.i.d. standard-normal vectors of length `dimension`, each scaled
/// to unit norm. Deterministic in `seed`.
pub fn sample_unit_vectors(dimension: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if dimension == 0 || count == 0 {
        return Err(Error::invalid("dimension and vector count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..dimension).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = dot(&v, &v).sqrt();
        // A zero draw is astronomically unlikely; resample rather than divide.
        if norm > 0.0 {
            out.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    Ok(out)
}
