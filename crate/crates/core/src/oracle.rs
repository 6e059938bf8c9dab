//! Exhaustive reference search.
//!
//! Enumerates the cartesian product of the per-keyword point groups and
//! keeps every tuple whose distinct points form a minimal covering set. It
//! shares only the distance function with the indexed search.

use crate::error::{Error, Result};
use crate::geometry::{diameter_by, distance_unchecked};
use crate::queue::{ResultEntry, ResultQueue};
use crate::types::{Dataset, PointId, Query};

/// Default cap on raw tuples enumerated per query.
pub const DEFAULT_LIMIT: u64 = 10_000_000;

/// Above this many distinct group points distances are computed on demand.
const MATRIX_LIMIT: usize = 4096;

/// Every minimal covering set of a query, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateUniverse {
    pub candidates: Vec<ResultEntry>,
    /// Size of the cartesian product that was enumerated.
    pub raw_tuples: u64,
}

impl CandidateUniverse {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

struct Groups {
    /// Distinct points that carry a query keyword, by dataset rank.
    members: Vec<usize>,
    /// Per query keyword, indices into `members`.
    groups: Vec<Vec<usize>>,
    /// Per member, bit i set when it carries query keyword i.
    masks: Vec<u64>,
    ids: Vec<PointId>,
    matrix: Option<Vec<f64>>,
}

impl Groups {
    fn new(dataset: &Dataset, query: &Query) -> Option<Self> {
        if query.len() > 64 {
            return None;
        }
        let mut kws = Vec::with_capacity(query.len());
        for name in query.keywords() {
            kws.push(dataset.keyword_id(name)?);
        }
        let mut members = Vec::new();
        let mut masks = Vec::new();
        for (rank, p) in dataset.points().iter().enumerate() {
            let mut mask = 0u64;
            for (i, &kw) in kws.iter().enumerate() {
                if p.keywords.contains(&kw) {
                    mask |= 1 << i;
                }
            }
            if mask != 0 {
                members.push(rank);
                masks.push(mask);
            }
        }
        let groups: Vec<Vec<usize>> = (0..kws.len())
            .map(|i| (0..members.len()).filter(|&m| masks[m] & (1 << i) != 0).collect())
            .collect();
        let ids = members.iter().map(|&r| dataset.points()[r].id).collect();
        let n = members.len();
        let matrix = (n <= MATRIX_LIMIT).then(|| {
            let mut m = vec![0.0; n * n];
            for a in 0..n {
                for b in a + 1..n {
                    let d = distance_unchecked(
                        &dataset.points()[members[a]].coords,
                        &dataset.points()[members[b]].coords,
                    );
                    m[a * n + b] = d;
                    m[b * n + a] = d;
                }
            }
            m
        });
        Some(Groups {
            members,
            groups,
            masks,
            ids,
            matrix,
        })
    }

    fn distance(&self, dataset: &Dataset, a: usize, b: usize) -> f64 {
        match &self.matrix {
            Some(m) => m[a * self.members.len() + b],
            None => distance_unchecked(
                &dataset.points()[self.members[a]].coords,
                &dataset.points()[self.members[b]].coords,
            ),
        }
    }
}

/// Product of group sizes, or `None` if some keyword is not in the dataset.
pub fn raw_tuple_count(dataset: &Dataset, query: &Query) -> Option<u128> {
    let g = Groups::new(dataset, query)?;
    Some(g.groups.iter().map(|g| g.len() as u128).product())
}

/// Call `visit(ids, diameter)` once per minimal covering set. Returns the
/// number of raw tuples enumerated.
pub fn for_each_candidate(
    dataset: &Dataset,
    query: &Query,
    limit: u64,
    mut visit: impl FnMut(&[PointId], f64),
) -> Result<u64> {
    let Some(g) = Groups::new(dataset, query) else {
        return Ok(0);
    };
    let total: u128 = g.groups.iter().map(|g| g.len() as u128).product();
    if total > limit as u128 {
        return Err(Error::ResourceLimit(format!(
            "{total} raw tuples exceed the enumeration limit of {limit}"
        )));
    }
    if total == 0 {
        return Ok(0);
    }
    let q = g.groups.len();
    let mut pick = vec![0usize; q];
    let mut set: Vec<usize> = Vec::with_capacity(q);
    let mut ids: Vec<PointId> = Vec::with_capacity(q);
    loop {
        set.clear();
        set.extend((0..q).map(|i| g.groups[i][pick[i]]));
        set.sort_unstable();
        set.dedup();
        if is_minimal(&g, &set) && is_canonical(&g, &set, &pick) {
            let diameter = diameter_by(set.len(), |a, b| g.distance(dataset, set[a], set[b]));
            ids.clear();
            ids.extend(set.iter().map(|&m| g.ids[m]));
            visit(&ids, diameter);
        }
        // Odometer step, last keyword fastest.
        let mut i = q;
        loop {
            if i == 0 {
                return Ok(total as u64);
            }
            i -= 1;
            pick[i] += 1;
            if pick[i] < g.groups[i].len() {
                break;
            }
            pick[i] = 0;
        }
    }
}

/// Every point must carry a query keyword that no other point carries.
fn is_minimal(g: &Groups, set: &[usize]) -> bool {
    set.iter().enumerate().all(|(i, &m)| {
        let others = set
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(0u64, |acc, (_, &o)| acc | g.masks[o]);
        g.masks[m] & !others != 0
    })
}

/// A set is produced by many tuples; accept only the one that assigns each
/// keyword to the lowest-indexed member of the set carrying it.
fn is_canonical(g: &Groups, set: &[usize], pick: &[usize]) -> bool {
    pick.iter().enumerate().all(|(i, &p)| {
        let chosen = g.groups[i][p];
        set.iter().find(|&&m| g.masks[m] & (1 << i) != 0) == Some(&chosen)
    })
}

pub fn enumerate_candidates(dataset: &Dataset, query: &Query, limit: u64) -> Result<CandidateUniverse> {
    let mut candidates = Vec::new();
    let raw_tuples = for_each_candidate(dataset, query, limit, |ids, d| {
        candidates.push(ResultEntry::new(ids.to_vec(), d));
    })?;
    candidates.sort_by(|a, b| a.rank_cmp(b));
    Ok(CandidateUniverse {
        candidates,
        raw_tuples,
    })
}

/// Exact top-k by exhaustive enumeration under [`DEFAULT_LIMIT`].
pub fn brute_force_topk(dataset: &Dataset, query: &Query, k: usize) -> Result<ResultQueue> {
    brute_force_topk_with_limit(dataset, query, k, DEFAULT_LIMIT)
}

pub fn brute_force_topk_with_limit(
    dataset: &Dataset,
    query: &Query,
    k: usize,
    limit: u64,
) -> Result<ResultQueue> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut queue = ResultQueue::with_sentinels(k);
    for_each_candidate(dataset, query, limit, |ids, d| {
        if d <= queue.kth_diameter() {
            queue.insert(ResultEntry::new(ids.to_vec(), d));
        }
    })?;
    Ok(queue)
}
