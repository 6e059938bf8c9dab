//! Bin keys, signatures and bucket ids.
//!
//! In exact mode each projection falls into two overlapping bins of width
//! `w`: `h1 = ⌊p/w⌋` and `h2 = ⌊(p − w/2)/w⌋ + C`, where `C` keeps the two key
//! families disjoint. Approximate mode keeps `h1` only.

use super::Mode;

/// Hash bucket identifier, always `< table_size`.
pub type BucketId = u64;

/// Bin keys for one projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinKeys {
    Single(i64),
    Pair(i64, i64),
}

impl BinKeys {
    pub fn first(&self) -> i64 {
        match *self {
            BinKeys::Single(h) | BinKeys::Pair(h, _) => h,
        }
    }

    pub fn as_slice(&self) -> Vec<i64> {
        match *self {
            BinKeys::Single(h) => vec![h],
            BinKeys::Pair(a, b) => vec![a, b],
        }
    }
}

#[inline]
pub fn primary_key(projection: f64, width: f64) -> i64 {
    (projection / width).floor() as i64
}

#[inline]
pub fn shifted_key(projection: f64, width: f64, constant: i64) -> i64 {
    ((projection - width / 2.0) / width).floor() as i64 + constant
}

pub fn hash_keys(projection: f64, width: f64, constant: i64, mode: Mode) -> BinKeys {
    debug_assert!(width > 0.0);
    let h1 = primary_key(projection, width);
    match mode {
        Mode::Approximate => BinKeys::Single(h1),
        Mode::Exact => BinKeys::Pair(h1, shifted_key(projection, width, constant)),
    }
}

/// Cartesian product of per-vector keys, preserving vector order; the first
/// vector's keys vary slowest.
pub fn signatures(keys: &[BinKeys]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::with_capacity(keys.len())];
    for k in keys {
        let choices = k.as_slice();
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for prefix in &out {
            for &c in &choices {
                let mut s = prefix.clone();
                s.push(c);
                next.push(s);
            }
        }
        out = next;
    }
    out
}

/// `|Σ key_i · prime_i| mod table_size`.
pub fn bucket_id(signature: &[i64], primes: &[u64], table_size: usize) -> BucketId {
    debug_assert!(primes.len() >= signature.len());
    let sum: i128 = signature
        .iter()
        .zip(primes)
        .map(|(&k, &p)| k as i128 * p as i128)
        .sum();
    (sum.unsigned_abs() % table_size as u128) as BucketId
}

/// The first `count` odd primes that are at least 31.
pub fn default_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = 31u64;
    while out.len() < count {
        if is_prime(n) {
            out.push(n);
        }
        n += 2;
    }
    out
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct bucket ids reached by a point's signatures, ascending.
pub(crate) fn point_buckets(
    projections: &[f64],
    width: f64,
    constants: &[i64],
    mode: Mode,
    primes: &[u64],
    table_size: usize,
) -> Vec<BucketId> {
    point_placements(projections, width, constants, mode, primes, table_size).0
}

/// As [`point_buckets`], plus the number of signatures generated.
pub(crate) fn point_placements(
    projections: &[f64],
    width: f64,
    constants: &[i64],
    mode: Mode,
    primes: &[u64],
    table_size: usize,
) -> (Vec<BucketId>, usize) {
    let keys: Vec<BinKeys> = projections
        .iter()
        .enumerate()
        .map(|(i, &p)| hash_keys(p, width, constants.get(i).copied().unwrap_or(0), mode))
        .collect();
    let sigs = signatures(&keys);
    let mut ids: Vec<BucketId> = sigs.iter().map(|s| bucket_id(s, primes, table_size)).collect();
    ids.sort_unstable();
    ids.dedup();
    (ids, sigs.len())
}
