//! Euclidean distance and set diameter.
//!
//! Every distance in the crate goes through [`distance`], so the search and
//! the brute-force oracle see bit-identical values for the same pair.

use crate::error::{Error, Result};

/// L2 distance between two coordinate vectors.
pub fn distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(distance_unchecked(a, b))
}

#[inline]
pub(crate) fn distance_unchecked(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let diff = x - y;
        sum += diff * diff;
    }
    sum.sqrt()
}

/// Maximum pairwise distance of a non-empty set; 0 for a singleton.
pub fn diameter<C: AsRef<[f64]>>(points: &[C]) -> Result<f64> {
    let Some(first) = points.first() else {
        return Err(Error::invalid("diameter of an empty set"));
    };
    let dim = first.as_ref().len();
    if points.iter().any(|p| p.as_ref().len() != dim) {
        return Err(Error::invalid("dimension mismatch in point set"));
    }
    Ok(diameter_unchecked(points))
}

pub(crate) fn diameter_unchecked<C: AsRef<[f64]>>(points: &[C]) -> f64 {
    diameter_by(points.len(), |i, j| {
        distance_unchecked(points[i].as_ref(), points[j].as_ref())
    })
}

/// Diameter of `n` items under an arbitrary pairwise distance, e.g. a
/// precomputed matrix.
pub fn diameter_by(n: usize, mut dist: impl FnMut(usize, usize) -> f64) -> f64 {
    let mut best = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(i, j);
            if d > best {
                best = d;
            }
        }
    }
    best
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
