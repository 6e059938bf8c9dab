//! Quality and filtering metrics.

use crate::error::{Error, Result};
use crate::geometry::dot;
use crate::index::hashing::{point_buckets, primary_key};
use crate::index::{sample_unit_vectors, Index, Mode};
use crate::oracle::{enumerate_candidates, CandidateUniverse, DEFAULT_LIMIT};
use crate::types::{Dataset, Query};

/// Number of normalized-diameter bins used for the diameter distribution.
pub const DIAMETER_BINS: usize = 50;

/// Candidates sampled per diameter bin when estimating containment.
pub const SAMPLES_PER_BIN: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct AarReport {
    /// Mean of the per-query ratios that could be computed.
    pub aar: f64,
    /// Per-query mean ratio; `None` for excluded queries.
    pub per_query: Vec<Option<f64>>,
    /// Queries with a zero true diameter but a positive reported one.
    pub flagged: usize,
}

/// Average approximation ratio. Each inner list holds one query's top-k
/// diameters, best first.
pub fn avg_approx_ratio(truth: &[Vec<f64>], reported: &[Vec<f64>]) -> Result<AarReport> {
    if truth.len() != reported.len() {
        return Err(Error::invalid(format!(
            "{} true result lists but {} reported",
            truth.len(),
            reported.len()
        )));
    }
    let mut per_query = Vec::with_capacity(truth.len());
    let mut flagged = 0;
    for (t, r) in truth.iter().zip(reported) {
        if t.len() != r.len() {
            return Err(Error::invalid(format!(
                "query has {} true diameters but {} reported",
                t.len(),
                r.len()
            )));
        }
        if t.is_empty() {
            per_query.push(None);
            continue;
        }
        let mut sum = 0.0;
        let mut infinite = false;
        for (&ts, &rs) in t.iter().zip(r) {
            if ts == 0.0 {
                if rs == 0.0 {
                    sum += 1.0;
                } else {
                    infinite = true;
                }
            } else {
                sum += rs / ts;
            }
        }
        if infinite {
            flagged += 1;
            per_query.push(None);
        } else {
            per_query.push(Some(sum / t.len() as f64));
        }
    }
    let kept: Vec<f64> = per_query.iter().flatten().copied().collect();
    let aar = if kept.is_empty() {
        f64::NAN
    } else {
        kept.iter().sum::<f64>() / kept.len() as f64
    };
    Ok(AarReport {
        aar,
        per_query,
        flagged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruningReport {
    /// Candidates lying entirely inside one bucket that holds every query
    /// keyword.
    pub explored: usize,
    /// All candidates of the query.
    pub total: usize,
    pub ratio: f64,
    /// Bin width the containment was measured at.
    pub width: f64,
}

/// Fraction of all candidates that share a bucket of an overlapping-bin
/// hashtable whose bin width is twice the best diameter. That is the
/// smallest width at which the exact search is guaranteed to stop.
pub fn pruning_ratio(index: &Index, dataset: &Dataset, query: &Query) -> Result<PruningReport> {
    let universe = enumerate_candidates(dataset, query, DEFAULT_LIMIT)?;
    let best = universe
        .candidates
        .first()
        .ok_or_else(|| Error::invalid("query has no candidates"))?
        .diameter();
    let width = if best > 0.0 { 2.0 * best } else { index.initial_width() };
    pruning_ratio_in(index, dataset, &universe, width)
}

/// As [`pruning_ratio`], at an explicit bin width.
pub fn pruning_ratio_at_width(
    index: &Index,
    dataset: &Dataset,
    query: &Query,
    width: f64,
) -> Result<PruningReport> {
    let universe = enumerate_candidates(dataset, query, DEFAULT_LIMIT)?;
    pruning_ratio_in(index, dataset, &universe, width)
}

fn pruning_ratio_in(
    index: &Index,
    dataset: &Dataset,
    universe: &CandidateUniverse,
    width: f64,
) -> Result<PruningReport> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::invalid("bin width must be positive and finite"));
    }
    if universe.is_empty() {
        return Err(Error::invalid("query has no candidates"));
    }
    let vectors = index.basis().vectors();
    let m = vectors.len();
    let projections: Vec<f64> = dataset
        .points()
        .iter()
        .flat_map(|p| vectors.iter().map(|z| dot(z, &p.coords)))
        .collect();
    let constants: Vec<i64> = (0..m)
        .map(|i| {
            let (lo, hi) = projections
                .iter()
                .skip(i)
                .step_by(m)
                .map(|&p| primary_key(p, width))
                .fold((i64::MAX, i64::MIN), |(lo, hi), h| (lo.min(h), hi.max(h)));
            hi - lo + 2
        })
        .collect();
    let config = index.config();
    let buckets_of = |id| -> Vec<u64> {
        let rank = dataset.rank_of(id).expect("candidate point from dataset");
        point_buckets(
            &projections[rank * m..(rank + 1) * m],
            width,
            &constants,
            Mode::Exact,
            &config.primes,
            config.table_size,
        )
    };
    let mut cache = std::collections::HashMap::new();
    let mut explored = 0;
    for c in &universe.candidates {
        let mut shared: Option<Vec<u64>> = None;
        for &id in c.ids() {
            let own = cache.entry(id).or_insert_with(|| buckets_of(id));
            shared = Some(match shared {
                None => own.clone(),
                Some(s) => s.into_iter().filter(|b| own.binary_search(b).is_ok()).collect(),
            });
        }
        if shared.is_some_and(|s| !s.is_empty()) {
            explored += 1;
        }
    }
    Ok(PruningReport {
        explored,
        total: universe.len(),
        ratio: explored as f64 / universe.len() as f64,
        width,
    })
}

/// Fraction of `vectors` on which every point of `set` falls into the same
/// non-overlapping bin of width `width`.
fn containment(set: &[&[f64]], vectors: &[Vec<f64>], width: f64) -> f64 {
    let hits = vectors
        .iter()
        .filter(|z| {
            let first = primary_key(dot(z, set[0]), width);
            set[1..].iter().all(|p| primary_key(dot(z, p), width) == first)
        })
        .count();
    hits as f64 / vectors.len() as f64
}

fn bin_of(diameter: f64, max: f64, bins: usize) -> usize {
    if max <= 0.0 {
        return 0;
    }
    (((diameter / max) * bins as f64) as usize).min(bins - 1)
}

/// Per-bin containment probability, averaged over up to
/// [`SAMPLES_PER_BIN`] candidates spread evenly through each bin.
fn containment_by_bin(
    dataset: &Dataset,
    universe: &CandidateUniverse,
    max: f64,
    vectors: &[Vec<f64>],
    width: f64,
) -> Vec<Option<f64>> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); DIAMETER_BINS];
    for (i, c) in universe.candidates.iter().enumerate() {
        members[bin_of(c.diameter(), max, DIAMETER_BINS)].push(i);
    }
    members
        .iter()
        .map(|m| {
            if m.is_empty() {
                return None;
            }
            let take = m.len().min(SAMPLES_PER_BIN);
            let total: f64 = (0..take)
                .map(|j| {
                    let c = &universe.candidates[m[j * m.len() / take]];
                    let coords: Vec<&[f64]> = c
                        .ids()
                        .iter()
                        .map(|&id| dataset.point(id).expect("candidate point").coords.as_slice())
                        .collect();
                    containment(&coords, vectors, width)
                })
                .sum();
            Some(total / take as f64)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistributions {
    /// Share of all keyword tags held by each dictionary keyword.
    pub keyword_mass: Vec<f64>,
    /// Share of candidates per normalized-diameter bin.
    pub diameter_mass: Vec<f64>,
    /// Estimated probability, per diameter bin, that a candidate falls into
    /// one bucket on all `m` vectors; `None` for empty bins.
    pub containment: Vec<Option<f64>>,
    pub max_diameter: f64,
    pub candidates: usize,
}

impl EmpiricalDistributions {
    /// Expected number of candidates that share a bucket.
    pub fn expected_explored(&self) -> f64 {
        self.diameter_mass
            .iter()
            .zip(&self.containment)
            .map(|(&f, c)| f * c.unwrap_or(0.0) * self.candidates as f64)
            .sum()
    }
}

pub fn empirical_distributions(
    dataset: &Dataset,
    query: &Query,
    m: u32,
    width: f64,
    samples: usize,
    seed: u64,
) -> Result<EmpiricalDistributions> {
    if samples == 0 || !(width > 0.0) {
        return Err(Error::invalid("need at least one sample and a positive width"));
    }
    let universe = enumerate_candidates(dataset, query, DEFAULT_LIMIT)?;
    let mut tags = vec![0usize; dataset.dictionary().len()];
    for p in dataset.points() {
        for &k in &p.keywords {
            tags[k as usize] += 1;
        }
    }
    let total_tags: usize = tags.iter().sum();
    let keyword_mass = tags.iter().map(|&c| c as f64 / total_tags as f64).collect();
    let max = universe
        .candidates
        .iter()
        .map(|c| c.diameter())
        .fold(0.0f64, f64::max);
    let mut diameter_mass = vec![0.0; DIAMETER_BINS];
    for c in &universe.candidates {
        diameter_mass[bin_of(c.diameter(), max, DIAMETER_BINS)] += 1.0;
    }
    if !universe.is_empty() {
        for v in &mut diameter_mass {
            *v /= universe.len() as f64;
        }
    }
    let vectors = sample_unit_vectors(dataset.dimension(), samples, seed)?;
    let containment = containment_by_bin(dataset, &universe, max, &vectors, width)
        .into_iter()
        .map(|p| p.map(|p| p.powi(m as i32)))
        .collect();
    Ok(EmpiricalDistributions {
        keyword_mass,
        diameter_mass,
        containment,
        max_diameter: max,
        candidates: universe.len(),
    })
}

/// Smallest candidate diameter `r'` at which the probability that some
/// candidate of diameter at most `r'` shares a bucket on all `m` vectors
/// reaches `confidence`, divided by the best diameter.
pub fn approx_bound(
    dataset: &Dataset,
    query: &Query,
    m: u32,
    width: f64,
    confidence: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&confidence) {
        return Err(Error::invalid("confidence must lie in [0, 1]"));
    }
    if samples == 0 || !(width > 0.0) {
        return Err(Error::invalid("need at least one sample and a positive width"));
    }
    let universe = enumerate_candidates(dataset, query, DEFAULT_LIMIT)?;
    approx_bound_in(dataset, &universe, m, width, &[confidence], samples, seed).map(|v| v[0])
}

/// [`approx_bound`] for several confidence levels over one candidate set.
pub fn approx_bound_in(
    dataset: &Dataset,
    universe: &CandidateUniverse,
    m: u32,
    width: f64,
    confidences: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if confidences.iter().any(|c| !(0.0..=1.0).contains(c)) {
        return Err(Error::invalid("confidence must lie in [0, 1]"));
    }
    let Some(first) = universe.candidates.first() else {
        return Err(Error::invalid("query has no candidates"));
    };
    let best = first.diameter();
    let max = universe.candidates.last().map_or(0.0, |c| c.diameter());
    let vectors = sample_unit_vectors(dataset.dimension(), samples, seed)?;
    let per_bin = containment_by_bin(dataset, universe, max, &vectors, width);
    let curve = survival_curve(universe, &per_bin, max, m);
    Ok(confidences
        .iter()
        .map(|&lambda| {
            let r = curve
                .iter()
                .find(|&&(_, p)| p >= lambda)
                .map_or(max, |&(r, _)| r);
            if best > 0.0 {
                r / best
            } else if r == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        })
        .collect())
}

/// `(r, P(r))` per candidate in ascending diameter order, where
/// `P(r) = 1 − Π (1 − p^m)` over candidates of diameter ≤ r.
fn survival_curve(universe: &CandidateUniverse, per_bin: &[Option<f64>], max: f64, m: u32) -> Vec<(f64, f64)> {
    let mut log_survival = 0.0f64;
    universe
        .candidates
        .iter()
        .map(|c| {
            let p = per_bin[bin_of(c.diameter(), max, DIAMETER_BINS)].unwrap_or(0.0);
            log_survival += (1.0 - p.powi(m as i32)).ln();
            (c.diameter(), 1.0 - log_survival.exp())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::synth::{gen_queries, gen_synthetic, SyntheticSpec};
    use crate::index::IndexConfig;

    #[test]
    fn exact_results_give_one() {
        let t = vec![vec![1.0, 2.0], vec![0.0, 3.0]];
        let r = avg_approx_ratio(&t, &t).unwrap();
        assert_eq!(r.aar, 1.0);
        assert_eq!(r.flagged, 0);
    }

    #[test]
    fn direct_ratio() {
        let r = avg_approx_ratio(&[vec![2.0]], &[vec![3.0]]).unwrap();
        assert_eq!(r.aar, 1.5);
    }

    #[test]
    fn zero_truth_flagged() {
        let r = avg_approx_ratio(&[vec![0.0], vec![2.0]], &[vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(r.flagged, 1);
        assert_eq!(r.per_query, vec![None, Some(1.0)]);
        assert_eq!(r.aar, 1.0);
        assert!(avg_approx_ratio(&[vec![1.0]], &[vec![1.0, 2.0]]).is_err());
        assert!(avg_approx_ratio(&[vec![1.0]], &[]).is_err());
    }

    #[test]
    fn wide_bins_keep_every_candidate() {
        let ds = gen_synthetic(&SyntheticSpec::new(300, 4, 10, 1, 5)).unwrap();
        let idx = Index::build(&ds, IndexConfig::default()).unwrap();
        for q in gen_queries(&ds, 3, 5, 1).unwrap() {
            let r = pruning_ratio_at_width(&idx, &ds, &q, 2.0 * idx.basis().max_span()).unwrap();
            assert_eq!(r.ratio, 1.0);
            let r = pruning_ratio(&idx, &ds, &q).unwrap();
            assert!(r.ratio > 0.0 && r.ratio <= 1.0);
            assert!(r.explored >= 1);
        }
    }

    #[test]
    fn co_located_group_is_never_pruned() {
        let mut b = Dataset::builder(2);
        b.push(1, vec![5.0, 5.0], &["a"]);
        b.push(2, vec![5.0, 5.0], &["b"]);
        b.push(3, vec![5.5, 5.0], &["c"]);
        let ds = b.build().unwrap();
        let idx = Index::build(&ds, IndexConfig::default()).unwrap();
        let q = Query::new(["a", "b", "c"]).unwrap();
        assert_eq!(pruning_ratio(&idx, &ds, &q).unwrap().ratio, 1.0);
    }

    #[test]
    fn bound_properties() {
        let ds = gen_synthetic(&SyntheticSpec::new(400, 8, 12, 1, 2)).unwrap();
        for q in gen_queries(&ds, 3, 4, 7).unwrap() {
            let universe = enumerate_candidates(&ds, &q, DEFAULT_LIMIT).unwrap();
            let width = universe.candidates[0].diameter() * 4.0;
            let rho = approx_bound_in(&ds, &universe, 2, width, &[0.0, 0.5, 0.8, 0.95], 200, 1).unwrap();
            assert_eq!(rho[0], 1.0);
            for w in rho.windows(2) {
                assert!(w[0] <= w[1]);
            }
            assert!(rho.iter().all(|&r| r >= 1.0));
        }
        let q = Query::new(["k0", "k1"]).unwrap();
        assert!(approx_bound(&ds, &q, 2, 10.0, 1.5, 10, 0).is_err());
        assert_eq!(approx_bound(&ds, &q, 2, 10.0, 0.0, 10, 0).unwrap(), 1.0);
    }

    #[test]
    fn survival_is_monotone() {
        let ds = gen_synthetic(&SyntheticSpec::new(300, 4, 8, 1, 9)).unwrap();
        let q = Query::new(["k1", "k2", "k3"]).unwrap();
        let universe = enumerate_candidates(&ds, &q, DEFAULT_LIMIT).unwrap();
        let max = universe.candidates.last().unwrap().diameter();
        let vectors = sample_unit_vectors(4, 100, 3).unwrap();
        let per_bin = containment_by_bin(&ds, &universe, max, &vectors, 2000.0);
        let curve = survival_curve(&universe, &per_bin, max, 2);
        for w in curve.windows(2) {
            assert!(w[0].1 <= w[1].1);
        }
    }

    #[test]
    fn distributions_are_normalized() {
        let ds = gen_synthetic(&SyntheticSpec::new(300, 4, 8, 2, 4)).unwrap();
        let q = Query::new(["k0", "k1", "k2"]).unwrap();
        let e = empirical_distributions(&ds, &q, 2, 1500.0, 50, 0).unwrap();
        assert!((e.keyword_mass.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((e.diameter_mass.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let n = e.expected_explored();
        assert!(n >= 0.0 && n <= e.candidates as f64);
    }
}
